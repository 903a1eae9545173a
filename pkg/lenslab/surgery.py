# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Homology of distance one surgeries m*mu + lambda on a knot in L(p, 1).

The knot K has winding number k: [K] = k[c] in H_1(L(p, 1)) = Z/p. For
k >= 1 the exterior has H_1 = Z generated by theta with [mu] = p[theta] and
[lambda] = -k^2[theta], so the surgered manifold has H_1 = Z/|pm - k^2|.
"""
from pydantic import BaseModel
from pydantic import StrictInt
from pydantic import ValidationError
from pydantic import root_validator
from sympy import isprime
from sympy import mod_inverse

from lenslab.exceptions import DegenerateForm
from lenslab.exceptions import InvalidParams


class SurgeryProblem(BaseModel):
    p: StrictInt
    k: StrictInt
    m: StrictInt

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def check_ranges(cls, values: dict) -> dict:
        p, k = values["p"], values["k"]
        if p < 5 or not isprime(p):
            raise ValueError(f"p must be a prime >= 5, got {p}")
        if not 0 <= k <= (p - 1) // 2:
            raise ValueError(f"winding number must lie in [0, {(p - 1) // 2}], got {k}")
        return values

    @classmethod
    def of(cls, p: int, k: int, m: int) -> "SurgeryProblem":
        try:
            return cls(p=p, k=k, m=m)
        except ValidationError as e:
            raise InvalidParams(f"Invalid surgery problem: {e}") from e

    @property
    def discriminant(self) -> int:
        """pm - k^2, the determinant of the intersection form Q_Z."""
        return self.p * self.m - self.k**2


class HomologyBasis(BaseModel):
    """theta = p' mu_0 + k' mu with p k' - k p' = 1."""

    p: int
    k: int
    p_prime: int
    k_prime: int

    class Config:
        frozen = True

    @property
    def mu_coefficient(self) -> int:
        return self.p

    @property
    def lambda_coefficient(self) -> int:
        return -self.k**2

    @property
    def unimodular(self) -> bool:
        return self.p * self.k_prime - self.k * self.p_prime == 1


class NullHomology(BaseModel):
    """H_1 = Z/p + Z/m of m-surgery on a null-homologous knot."""

    p: int
    m: int

    class Config:
        frozen = True

    @property
    def order(self) -> int:
        return self.p * abs(self.m)


class LinkingForm(BaseModel):
    """The form q/order on a cyclic group of the given order."""

    order: int
    q: int

    class Config:
        frozen = True


def _require_essential(sp: SurgeryProblem) -> None:
    if sp.k < 1:
        raise InvalidParams("Null-homologous knots (k = 0) use h1_null")


def h1_order(sp: SurgeryProblem) -> int:
    _require_essential(sp)
    return abs(sp.discriminant)


def h1_null(p: int, m: int) -> NullHomology:
    return NullHomology(p=p, m=m)


def is_spin_cobordism(sp: SurgeryProblem) -> bool:
    """The surgery cobordism is Spin iff the surgered H_1 has even order."""
    return h1_order(sp) % 2 == 0


def qz_b_plus_minus(sp: SurgeryProblem) -> tuple[int, int]:
    """(b+, b-) of Q_Z = [[p, k], [k, m]].

    Raises:
        DegenerateForm: If pm - k^2 = 0.
    """
    determinant = sp.discriminant
    if determinant == 0:
        raise DegenerateForm(f"Q_Z is degenerate for (p, k, m) = ({sp.p}, {sp.k}, {sp.m})")
    if determinant < 0:
        return 1, 1
    return (2, 0) if sp.p + sp.m > 0 else (0, 2)


def _bezout(a: int, b: int) -> tuple[int, int]:
    """(x, y) with a x - b y = 1."""
    try:
        y = -int(mod_inverse(b, a)) % a
    except ValueError as e:
        raise InvalidParams(f"gcd({a}, {b}) != 1") from e
    return (1 + b * y) // a, y


def homology_basis(p: int, k: int) -> HomologyBasis:
    if k < 1:
        raise InvalidParams("The theta basis needs winding number k >= 1")
    k_prime, p_prime = _bezout(p, k)
    return HomologyBasis(p=p, k=k, p_prime=p_prime, k_prime=k_prime)


def linking_form(sp: SurgeryProblem) -> LinkingForm:
    """Linking form of the surgered manifold.

    The curve l = k^2 mu + p lambda is null-homologous in the exterior and
    M = c mu + d lambda with cp - dk^2 = 1 generates its H_1. The slope
    m mu + lambda equals (pm - k^2) M + (c - dm) l, so the form is
    (c - dm) / (pm - k^2).
    """
    _require_essential(sp)
    c, d = _bezout(sp.p, sp.k**2)
    y = c - d * sp.m
    order = abs(sp.discriminant)
    sign = 1 if sp.discriminant > 0 else -1
    return LinkingForm(order=order, q=(sign * y) % order if order > 1 else 0)


def target_linking_form(n: int) -> LinkingForm:
    """Linking form of L(n, 1)."""
    if n == 0:
        raise InvalidParams("L(0, 1) has infinite H_1")
    order = abs(n)
    return LinkingForm(order=order, q=(1 if n > 0 else -1) % order if order > 1 else 0)
