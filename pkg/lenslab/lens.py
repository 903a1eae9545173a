# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""d-invariants of lens spaces.

Spin^c structures on L(p, q) are labelled by 0 <= i < p. A negative p denotes
the orientation reversed space with the same labels, so
d(L(-p, q), i) = -d(L(p, q), i).
"""
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd

from lenslab.exceptions import InvalidParams


def _check_lens(p: int, q: int) -> None:
    if p == 1:
        return
    if not 0 < q < p:
        raise InvalidParams(f"L({p},{q}) requires 0 < q < p")
    if gcd(p, q) != 1:
        raise InvalidParams(f"L({p},{q}) requires gcd(p, q) = 1")


def _check_index(p: int, i: int) -> None:
    if not 0 <= i < abs(p):
        raise InvalidParams(f"Spin^c index {i} out of range for |p| = {abs(p)}")


@lru_cache(maxsize=4096)
def d_table(p: int, q: int) -> tuple[Fraction, ...]:
    """All d-invariants of L(p, q), indexed by Spin^c label.

    Args:
        p: Order of the first homology, p >= 1.
        q: Second lens parameter, 0 < q < p coprime to p (ignored for p = 1).
    """
    _check_lens(p, q)
    if p == 1:
        return (Fraction(0),)
    inner = d_table(q, p % q) if q > 1 else (Fraction(0),)
    return tuple(
        Fraction(-1, 4) + Fraction((2 * i + 1 - p - q) ** 2, 4 * p * q) - inner[i % q]
        for i in range(p)
    )


def d_lens(p: int, q: int, i: int) -> Fraction:
    _check_lens(p, q)
    _check_index(p, i)
    return d_table(p, q)[i]


def d_lens_signed(p: int, q: int, i: int) -> Fraction:
    if p == 0:
        raise InvalidParams("L(0, q) is not a rational homology sphere")
    value = d_lens(abs(p), q, i)
    return value if p > 0 else -value


def d_Ln1(n: int, i: int) -> Fraction:  # noqa: N802
    """Closed form d(L(n, 1), i) = -1/4 + (2i - n)^2 / 4n, negated for n < 0."""
    if n == 0:
        raise InvalidParams("L(0, 1) is not a rational homology sphere")
    _check_index(n, i)
    size = abs(n)
    value = Fraction(-1, 4) + Fraction((2 * i - size) ** 2, 4 * size)
    return value if n > 0 else -value


def self_conjugate_indices(p: int, q: int) -> frozenset[int]:
    _check_lens(p, q)
    candidates = (p + q - 1, q - 1)
    return frozenset(c // 2 % p for c in candidates if c % 2 == 0)


class LensClosedForm(Enum):
    """Closed-form d-values of the lens spaces entering the k = 1 analysis.

    The first four hold for m >= 2, the last four for m <= -2. The ln1 forms
    give d(L(|pm - 1|, 1)); the lnp forms give d(L(|pm - 1|, p)) at the index
    (p - 1)/2 (centre) or (3p - 1)/2 (shifted).
    """

    ln1_zero = "ln1_zero"
    ln1 = "ln1"
    lnp_centre = "lnp_centre"
    lnp_shifted = "lnp_shifted"
    ln1_zero_negative = "ln1_zero_negative"
    ln1_negative = "ln1_negative"
    lnp_centre_negative = "lnp_centre_negative"
    lnp_shifted_negative = "lnp_shifted_negative"

    @property
    def positive_m(self) -> bool:
        return not self.value.endswith("_negative")

    def valid_m(self, m: int) -> bool:
        return m >= 2 if self.positive_m else m <= -2

    def space(self, p: int, m: int) -> tuple[int, int]:
        """The lens space (n, q) whose d-value the formula gives."""
        n = p * m - 1 if self.positive_m else -p * m + 1
        if self.value.startswith("ln1"):
            return n, 1
        return n, p

    def index(self, p: int, j: int = 0) -> int:
        match self:
            case LensClosedForm.ln1_zero | LensClosedForm.ln1_zero_negative:
                return 0
            case LensClosedForm.ln1 | LensClosedForm.ln1_negative:
                return j
            case LensClosedForm.lnp_centre | LensClosedForm.lnp_centre_negative:
                return (p - 1) // 2
            case LensClosedForm.lnp_shifted | LensClosedForm.lnp_shifted_negative:
                return (3 * p - 1) // 2
        raise NotImplementedError(self)


def d_closed_form(family: LensClosedForm, p: int, m: int, j: int = 0) -> Fraction:
    if not family.valid_m(m):
        raise InvalidParams(f"{family.value} is not defined at m = {m}")
    n, _ = family.space(p, m)
    if family in (LensClosedForm.ln1, LensClosedForm.ln1_negative):
        _check_index(n, j)
    match family:
        case LensClosedForm.ln1_zero:
            return Fraction(p * m - 2, 4)
        case LensClosedForm.ln1 | LensClosedForm.ln1_negative:
            return Fraction(-1, 4) + Fraction((2 * j - n) ** 2, 4 * n)
        case LensClosedForm.lnp_centre:
            return Fraction(m - 2, 4)
        case LensClosedForm.lnp_shifted:
            return Fraction(
                p * m**2 - (6 * p + 1) * m + 4 * p + 6, 4 * (p * m - 1)
            )
        case LensClosedForm.ln1_zero_negative:
            return Fraction(-p * m, 4)
        case LensClosedForm.lnp_centre_negative:
            return Fraction(-m, 4)
        case LensClosedForm.lnp_shifted_negative:
            return Fraction(
                p * m**2 + (4 * p - 1) * m + 4 * p - 4, 4 * (-p * m + 1)
            )
    raise NotImplementedError(family)
