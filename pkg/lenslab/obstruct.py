# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""d-invariant and linking form obstructions to distance one surgeries.

Every engine returns a `Verdict`. Obstructed verdicts carry a witness that can
be rechecked by hand: a negative or non-integral value, or an exhaustively
searched empty set of roots or residues.
"""
from collections.abc import Callable
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Annotated
from typing import Literal

import structlog
from pydantic import BaseModel
from pydantic import Field
from sympy import factorint
from sympy import integer_nthroot

from lenslab.exactlat import Rational
from lenslab.exceptions import InconsistentVerdict
from lenslab.exceptions import InvalidParams
from lenslab.exceptions import NotApplicable
from lenslab.lens import d_Ln1
from lenslab.lens import d_lens_signed
from lenslab.lens import self_conjugate_indices
from lenslab.plumbing import GraphFamily
from lenslab.plumbing import build_family_graph
from lenslab.plumbing import d_plumbed
from lenslab.plumbing import mu_shifted_class
from lenslab.plumbing import seifert_closed_form
from lenslab.simpleknot import xi0_support_ok
from lenslab.surgery import SurgeryProblem
from lenslab.surgery import h1_order
from lenslab.surgery import linking_form
from lenslab.surgery import target_linking_form

logger = structlog.stdlib.get_logger()

NEGATIVE_LENS_CITATION = (
    "A distance one surgery on L(m, 1), m odd squarefree, "
    "yields -L(m, 1) iff m = 1 or m = 5"
)


class Outcome(str, Enum):
    OBSTRUCTED = "obstructed"
    NOT_OBSTRUCTED = "not_obstructed"
    REALIZED = "realized"
    OUTSIDE_APPLICABILITY = "outside_applicability"
    UNDETERMINED = "undetermined"


class NegativeValue(BaseModel):
    kind: Literal["negative"] = "negative"
    name: str
    value: Rational


class NonIntegralValue(BaseModel):
    kind: Literal["non_integral"] = "non_integral"
    name: str
    value: Rational


class EmptyRootSet(BaseModel):
    kind: Literal["no_root"] = "no_root"
    name: str
    branches: tuple[Rational, ...]
    lo: int
    hi: int


class RootFound(BaseModel):
    kind: Literal["root"] = "root"
    name: str
    branch: Rational
    j: int


class BelowTwo(BaseModel):
    kind: Literal["v_below_two"] = "v_below_two"
    value: Rational


class SingleClass(BaseModel):
    """m = 1 leaves no i = 1 Spin^c structure to constrain N_{0,1}."""

    kind: Literal["single_class"] = "single_class"
    value: Rational


class SpinDelta(BaseModel):
    kind: Literal["spin_delta"] = "spin_delta"
    indices: tuple[int, ...]
    deltas: tuple[Rational, ...]


class SpinMatch(BaseModel):
    kind: Literal["spin_match"] = "spin_match"
    index: int
    delta: Rational


class NonResidue(BaseModel):
    kind: Literal["non_residue"] = "non_residue"
    order: int
    q_candidate: int
    q_target: int


class ResidueFound(BaseModel):
    kind: Literal["residue"] = "residue"
    order: int
    a: int


class Hypothesis(BaseModel):
    kind: Literal["hypothesis"] = "hypothesis"
    reason: str


class ImportedFact(BaseModel):
    kind: Literal["imported_fact"] = "imported_fact"
    citation: str
    m: int
    allowed: tuple[int, ...]


class Realization(BaseModel):
    kind: Literal["realization"] = "realization"
    tag: str
    citation: str


Witness = Annotated[
    NegativeValue
    | NonIntegralValue
    | EmptyRootSet
    | RootFound
    | BelowTwo
    | SingleClass
    | SpinDelta
    | SpinMatch
    | NonResidue
    | ResidueFound
    | Hypothesis
    | ImportedFact
    | Realization,
    Field(discriminator="kind"),
]


class Verdict(BaseModel):
    outcome: Outcome
    engine: str
    witness: Witness

    class Config:
        frozen = True

    @property
    def obstructed(self) -> bool:
        return self.outcome == Outcome.OBSTRUCTED


class VBranch(BaseModel):
    """A candidate V (or N_{0,0}) and the staircase options for its successor."""

    v0: Rational

    @property
    def v1_options(self) -> tuple[Fraction, ...]:
        return tuple(v for v in (self.v0, self.v0 - 1) if v >= 0)


def _obstructed(engine: str, witness: Witness) -> Verdict:
    return Verdict(outcome=Outcome.OBSTRUCTED, engine=engine, witness=witness)


def _open(engine: str, witness: Witness) -> Verdict:
    return Verdict(outcome=Outcome.NOT_OBSTRUCTED, engine=engine, witness=witness)


def _outside(engine: str, reason: str) -> Verdict:
    return Verdict(
        outcome=Outcome.OUTSIDE_APPLICABILITY,
        engine=engine,
        witness=Hypothesis(reason=reason),
    )


def _check_value(engine: str, name: str, value: Fraction) -> Verdict | None:
    """Obstructed verdict unless value is a nonnegative integer."""
    if value < 0:
        return _obstructed(engine, NegativeValue(name=name, value=value))
    if value.denominator != 1:
        return _obstructed(engine, NonIntegralValue(name=name, value=value))
    return None


def quad_root_in_range(a: int, b: int, c: int, lo: int, hi: int) -> int | None:
    """Least integer root of a x^2 + b x + c in [lo, hi], found exactly."""
    if lo > hi:
        raise InvalidParams(f"Empty range [{lo}, {hi}]")
    if a == 0:
        if b == 0:
            return lo if c == 0 else None
        if c % b != 0:
            return None
        root = -c // b
        return root if lo <= root <= hi else None
    discriminant = b * b - 4 * a * c
    if discriminant < 0:
        return None
    s, exact = integer_nthroot(discriminant, 2)
    if not exact:
        return None
    roots = []
    for numerator in (-b - int(s), -b + int(s)):
        if numerator % (2 * a) == 0 and lo <= numerator // (2 * a) <= hi:
            roots.append(numerator // (2 * a))
    return min(roots, default=None)


def _lens_root(n: int, value: Fraction) -> int | None:
    """Least j in [0, |n| - 1] with d(L(n, 1), j) = value.

    The sweep is cross-checked against the equivalent quadratic
    j^2 - N j + N (N - 4 s value - 1) / 4 = 0 with N = |n| and s = sign(n).

    Raises:
        InconsistentVerdict: If the sweep and the quadratic disagree.
    """
    size = abs(n)
    sign = 1 if n > 0 else -1
    swept = next((j for j in range(size) if d_Ln1(n, j) == value), None)
    constant = Fraction(size * (size - 4 * sign * value - 1), 4)
    solved = (
        quad_root_in_range(1, -size, constant.numerator, 0, size - 1)
        if constant.denominator == 1
        else None
    )
    if swept != solved:
        raise InconsistentVerdict(
            f"d(L({n},1), j) = {value}: sweep gives {swept}, quadratic gives {solved}"
        )
    return swept


def _staircase(
    engine: str, name: str, n: int, branch: VBranch, target: Callable[[Fraction], Fraction]
) -> Verdict:
    """Search both successor values for a j matching the shifted d-value."""
    options = branch.v1_options
    for v1 in options:
        j = _lens_root(n, target(v1))
        if j is not None:
            return _open(engine, RootFound(name=name, branch=v1, j=j))
    return _obstructed(engine, EmptyRootSet(name=name, branches=options, lo=0, hi=abs(n) - 1))


class NullOrientation(str, Enum):
    """Sign of the surgery coefficient, then sign of the target L(+-pm, 1)."""

    PLUS_PLUS = "++"
    MINUS_MINUS = "--"
    MINUS_PLUS = "-+"
    PLUS_MINUS = "+-"

    @property
    def coefficient_sign(self) -> int:
        return 1 if self.value[0] == "+" else -1

    @property
    def target_sign(self) -> int:
        return 1 if self.value[1] == "+" else -1


def null_case(p: int, m: int, orientation: NullOrientation) -> Verdict:
    """The surgery formula for null-homologous knots, for odd m >= 1.

    A negative coefficient is handled by reversing orientation, so the
    formula is always applied to +m surgery on Y = L(+-p, 1).
    """
    engine = "null"
    if m < 1 or m % 2 == 0:
        raise InvalidParams(f"Null-homologous case needs odd m >= 1, got {m}")
    y_sign = orientation.coefficient_sign
    target = orientation.target_sign * orientation.coefficient_sign * p * m
    d_y = d_Ln1(y_sign * p, 0)
    n00 = (d_y + d_Ln1(m, 0) - d_Ln1(target, 0)) / 2
    logger.debug("Null case", p=p, m=m, orientation=orientation.value, n00=str(n00))
    if (verdict := _check_value(engine, "N00", n00)) is not None:
        return verdict
    if m == 1:
        return _open(engine, SingleClass(value=n00))
    return _staircase(
        engine,
        "N01",
        target,
        VBranch(v0=n00),
        lambda n01: d_y + d_Ln1(m, 1) - 2 * n01,
    )


def _in_window(sp: SurgeryProblem) -> bool:
    p, k, m = sp.p, sp.k, sp.m
    if sp.discriminant > 0:
        return m >= Fraction((p + k) * k, 2 * p) + 1
    return m <= Fraction((3 * k - p) * k, 2 * p) - 1


def _applicability(sp: SurgeryProblem) -> str | None:
    """Reason the surgery formulas do not apply, or None."""
    order = abs(sp.discriminant)
    if sp.discriminant > 0 and order < 5:
        return "|H_1| < 5"
    if order == 1:
        return "|H_1| = 1"
    if _in_window(sp):
        return None
    if sp.p not in (5, 7):
        return "m outside the range where A_{xi_0} carries the minimal grading"
    if sp.discriminant > 0 and not xi0_support_ok(sp.p, sp.k, sp.m):
        return "minimal grading of the simple knot cone is not at xi_0"
    return None


# Plumbings of M for small m, keyed by (p, k), with the largest m they cover.
_SMALL_FAMILIES: dict[tuple[int, int], tuple[GraphFamily, int]] = {
    (5, 2): (GraphFamily.l5_k2, -1),
    (7, 2): (GraphFamily.l7_k2, -1),
    (7, 3): (GraphFamily.l7_k3, 0),
}


def _plumbing_d_values(
    family: GraphFamily, sp: SurgeryProblem, threads: int
) -> tuple[Fraction, Fraction | None]:
    graph = build_family_graph(family, sp.p, sp.k, sp.m)
    assert graph.t_m is not None
    table = d_plumbed(graph, threads)
    t_m = table.entry_for(graph.t_m)
    if graph.mu_shift is None:
        return t_m.d, None
    shifted = mu_shifted_class(graph, t_m.spinc, table)
    return t_m.d, table.entry_for(shifted.canonical).d


def seifert_d_values(
    sp: SurgeryProblem, use_plumbing: bool = False, threads: int = 1
) -> tuple[Fraction, Fraction | None]:
    """d(M, t_M) and d(M, t_M + i*PD[mu]) for M = M(0,0;(m-k,1),(p-k,1),(k,1)).

    The second value is None when the plumbing has no mu vertex.

    Raises:
        NotApplicable: If no description of M is available.
    """
    p, k, m = sp.p, sp.k, sp.m
    if k == 1:
        # M is the lens space L(pm - 1, p)
        if abs(p * m - 1) <= p:
            raise NotApplicable(f"L({p * m - 1},{p}) is outside the lens range")
        return (
            d_lens_signed(p * m - 1, p, (p - 1) // 2),
            d_lens_signed(p * m - 1, p, (3 * p - 1) // 2),
        )
    if m >= k + 3 and not use_plumbing:
        return seifert_closed_form(GraphFamily.star, p, k, m)
    if m >= k + 1:
        return _plumbing_d_values(GraphFamily.star, sp, threads)
    small = _SMALL_FAMILIES.get((p, k))
    if small is not None and m <= small[1]:
        family = small[0]
        if use_plumbing:
            return _plumbing_d_values(family, sp, threads)
        return seifert_closed_form(family, p, k, m)
    raise NotApplicable(f"No plumbing description of M for (p, k, m) = ({p}, {k}, {m})")


def essential_case(
    sp: SurgeryProblem, target_n: int, use_plumbing: bool = False, threads: int = 1
) -> Verdict:
    """The surgery formula for homologically essential knots.

    d(L(n,1), 0) = d(M, t_M) -+ 2V and, when V >= 2,
    d(L(n,1), j) = d(M, t_M + i*PD[mu]) -+ 2V' with V' in {V, V - 1},
    with the upper signs for pm - k^2 > 0.
    """
    engine = "essential"
    order = h1_order(sp)
    if abs(target_n) != order or target_n % 2 == 0:
        raise InvalidParams(f"Target L({target_n},1) does not match |H_1| = {order}")
    if (reason := _applicability(sp)) is not None:
        return _outside(engine, reason)
    try:
        d_m0, d_m1 = seifert_d_values(sp, use_plumbing, threads)
    except NotApplicable as e:
        return _outside(engine, str(e))

    sign = 1 if sp.discriminant > 0 else -1
    v0 = sign * (d_m0 - d_Ln1(target_n, 0)) / 2
    logger.debug("Essential case", p=sp.p, k=sp.k, m=sp.m, n=target_n, v=str(v0))
    if (verdict := _check_value(engine, "V", v0)) is not None:
        return verdict
    if v0 < 2:
        return _open(engine, BelowTwo(value=v0))
    if d_m1 is None:
        return _outside(engine, "no mu vertex in the plumbing of M")
    return _staircase(
        engine, "V_mu", target_n, VBranch(v0=v0), lambda v1: d_m1 - sign * 2 * v1
    )


def spin_deltad_check(p: int, n: int) -> Verdict:
    """Spin cobordisms between L-spaces with b2+ = 1 shift d by -1/4."""
    engine = "spin"
    if n == 0 or n % 2 != 0:
        raise InvalidParams(f"Spin check needs even nonzero n, got {n}")
    d_source = d_Ln1(p, 0)
    indices = tuple(sorted(self_conjugate_indices(abs(n), 1)))
    deltas = []
    for i in indices:
        delta = d_Ln1(n, i) - d_source
        if delta in (Fraction(-1, 4), Fraction(1, 4)):
            return _open(engine, SpinMatch(index=i, delta=delta))
        deltas.append(delta)
    return _obstructed(engine, SpinDelta(indices=indices, deltas=tuple(deltas)))


def linking_form_obstruct(order: int, q_candidate: int, q_target: int) -> Verdict:
    """Forms q1/order and q2/order are equivalent iff q1 = q2 a^2 for a unit a."""
    engine = "linking_form"
    if order < 1:
        raise InvalidParams(f"Order must be positive, got {order}")
    if order == 1:
        return _open(engine, ResidueFound(order=1, a=1))
    if gcd(q_candidate, order) != 1 or gcd(q_target, order) != 1:
        raise InvalidParams(f"Forms {q_candidate}/{order}, {q_target}/{order} are not unimodular")
    for a in range(1, order):
        if gcd(a, order) == 1 and (q_candidate - q_target * a * a) % order == 0:
            return _open(engine, ResidueFound(order=order, a=a))
    return _obstructed(
        engine, NonResidue(order=order, q_candidate=q_candidate, q_target=q_target)
    )


def linking_form_case(sp: SurgeryProblem, n: int) -> Verdict:
    candidate = linking_form(sp)
    target = target_linking_form(n)
    if candidate.order != target.order:
        raise InvalidParams(f"|H_1| = {candidate.order} does not match L({n},1)")
    return linking_form_obstruct(candidate.order, candidate.q, target.q)


def negative_lens_allowed(m: int, allowed: frozenset[int] = frozenset({1, 5})) -> bool:
    """Whether L(m, 1) admits a distance one surgery to -L(m, 1), for odd squarefree m."""
    if m < 1 or m % 2 == 0:
        raise InvalidParams(f"m must be a positive odd integer, got {m}")
    if any(exponent > 1 for exponent in factorint(m).values()):
        raise InvalidParams(f"{m} is not squarefree")
    return m in allowed


def negative_lens_verdict(
    p: int, allowed: frozenset[int] = frozenset({1, 5}), citation: str = NEGATIVE_LENS_CITATION
) -> Verdict:
    fact = ImportedFact(citation=citation, m=p, allowed=tuple(sorted(allowed)))
    if negative_lens_allowed(p, allowed):
        return _open("imported_fact", fact)
    return _obstructed("imported_fact", fact)
