# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Exact rational arithmetic and integer linear algebra.

All values are Python integers or `fractions.Fraction`, so no computation in
this module can overflow or round.
"""
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

import numpy as np
from pydantic import BaseModel
from pydantic import StrictInt
from pydantic import validator

from lenslab.exceptions import NotSymmetric
from lenslab.exceptions import SingularMatrix

RationalMatrix = tuple[tuple[Fraction, ...], ...]


class Rational(Fraction):
    """Fraction usable as a pydantic field, parsed from "a/b" strings and ints."""

    @classmethod
    def __get_validators__(cls) -> Iterator[Callable[[Any], Fraction]]:
        yield cls.validate

    @classmethod
    def validate(cls, value: Any) -> Fraction:
        if isinstance(value, bool | float):
            raise TypeError("exact rational expected")
        try:
            return Fraction(value)
        except (TypeError, ValueError) as e:
            raise TypeError(f"not a rational: {value!r}") from e


def format_rational(value: Fraction | int) -> str:
    """Reduced "a/b", or a bare integer when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class IntMatrix(BaseModel):
    rows: tuple[tuple[StrictInt, ...], ...]

    class Config:
        frozen = True

    @validator("rows")
    def check_square(
        cls, rows: tuple[tuple[int, ...], ...]
    ) -> tuple[tuple[int, ...], ...]:
        if not rows:
            raise ValueError("Matrix must have dimension >= 1")
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("Matrix must be square")
        return rows

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(rows=tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def symmetric(self) -> bool:
        return all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.rows[i][j]

    def leading(self, size: int) -> "IntMatrix":
        """Upper-left `size` x `size` submatrix."""
        return IntMatrix(rows=tuple(row[:size] for row in self.rows[:size]))

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)


def identity(n: int) -> IntMatrix:
    return IntMatrix.of([[int(i == j) for j in range(n)] for i in range(n)])


def det(matrix: IntMatrix) -> int:
    """Determinant by Bareiss fraction-free elimination.

    Every intermediate value is an exact integer minor of the input.
    """
    a = [list(row) for row in matrix.rows]
    n = matrix.n
    sign = 1
    previous = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
        previous = a[k][k]
    return sign * a[n - 1][n - 1]


def leading_minors(matrix: IntMatrix) -> list[int]:
    return [det(matrix.leading(size)) for size in range(1, matrix.n + 1)]


def inverse(matrix: IntMatrix) -> RationalMatrix:
    """Exact inverse by Gauss-Jordan elimination over the rationals.

    Raises:
        SingularMatrix: If the determinant vanishes.
    """
    n = matrix.n
    x = np.array([[Fraction(v) for v in row] for row in matrix.rows], dtype=object)
    y = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)

    for i in range(n):
        pivot = next((j for j in range(i, n) if x[j, i] != 0), None)
        if pivot is None:
            raise SingularMatrix(n)
        if pivot != i:
            x[[i, pivot]] = x[[pivot, i]]
            y[[i, pivot]] = y[[pivot, i]]
        y[i, :] /= x[i, i]
        x[i, :] /= x[i, i]
        for j in range(n):
            if j != i and x[j, i] != 0:
                y[j, :] -= x[j, i] * y[i, :]
                x[j, :] -= x[j, i] * x[i, :]

    return tuple(tuple(Fraction(v) for v in row) for row in y)


def is_negative_definite(matrix: IntMatrix) -> bool:
    """Sylvester's criterion: leading minors alternate in sign, starting negative.

    Raises:
        NotSymmetric: If the matrix is not symmetric.
    """
    for i in range(matrix.n):
        for j in range(i + 1, matrix.n):
            if matrix[i, j] != matrix[j, i]:
                raise NotSymmetric(i, j)
    return all(
        (-1) ** size * minor > 0
        for size, minor in enumerate(leading_minors(matrix), start=1)
    )


def is_integral_vector(vector: Iterable[Fraction | int]) -> bool:
    return all(Fraction(v).denominator == 1 for v in vector)


def matvec(
    matrix: RationalMatrix | IntMatrix, vector: Sequence[int | Fraction]
) -> tuple[Fraction, ...]:
    rows = matrix.rows if isinstance(matrix, IntMatrix) else matrix
    return tuple(
        sum((Fraction(a) * b for a, b in zip(row, vector, strict=True)), Fraction(0))
        for row in rows
    )


def quadratic_form(inverse_matrix: RationalMatrix, w: Sequence[int]) -> Fraction:
    """Evaluate w * M^-1 * w^T exactly."""
    return sum(
        (Fraction(a) * b for a, b in zip(w, matvec(inverse_matrix, w), strict=True)),
        Fraction(0),
    )
