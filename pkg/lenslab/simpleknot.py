# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Mapping cones of m*mu + lambda surgery on the simple knot K(p, 1, k).

A class diagram lists the A-complexes at positions r + jD, D = pm - k^2, each
labelled by a sign: "o" when the Alexander grading lies in the grading set S
of the knot, otherwise the sign of the position. Vertical maps leave "o" and
"+" nodes, horizontal maps leave "o" and "-" nodes.
"""
from enum import Enum
from fractions import Fraction

import numpy as np
import structlog
from pydantic import BaseModel

from lenslab.exceptions import InvalidParams

logger = structlog.stdlib.get_logger()


class Sign(str, Enum):
    minus = "-"
    circ = "o"
    plus = "+"


class GradingSet(BaseModel):
    values: tuple[int, ...]

    class Config:
        frozen = True

    @property
    def max(self) -> int:
        return self.values[-1]

    def __contains__(self, value: object) -> bool:
        return value in self.values


class ConeDiagram(BaseModel):
    p: int
    k: int
    m: int
    residue: int
    positions: tuple[int, ...]
    signs: tuple[Sign, ...]

    class Config:
        frozen = True

    @property
    def discriminant(self) -> int:
        return self.p * self.m - self.k**2


class SummandHomology(BaseModel):
    rank: int
    top_support: frozenset[int]

    class Config:
        frozen = True


def alexander_gradings(p: int, k: int) -> GradingSet:
    """Alexander gradings of the p intersection points of K(p, 1, k).

    The points are visited along the knot: one step of +k, then k steps of
    -(p - k), then steps of +k until the walk closes up. The result is
    centred so that it is symmetric about 0.
    """
    if not 1 <= k <= (p - 1) // 2:
        raise InvalidParams(f"K({p},1,{k}) requires 1 <= k <= (p - 1)/2")
    walk = [0, k]
    for _ in range(k):
        walk.append(walk[-1] - (p - k))
    while walk[-1] + k != 0:
        walk.append(walk[-1] + k)
    if len(set(walk)) != p:
        raise InvalidParams(f"Grading walk of K({p},1,{k}) does not visit {p} points")
    shift = -Fraction(max(walk) + min(walk), 2)
    if shift.denominator != 1:
        raise InvalidParams(f"Grading set of K({p},1,{k}) is not integral")
    return GradingSet(values=tuple(sorted(r + int(shift) for r in walk)))


def _sign(position: int, gradings: GradingSet) -> Sign:
    if position in gradings:
        return Sign.circ
    return Sign.plus if position > 0 else Sign.minus


def _check_positive(p: int, k: int, m: int) -> int:
    discriminant = p * m - k**2
    if discriminant <= 0:
        raise InvalidParams(f"Cone diagrams need pm - k^2 > 0, got {discriminant}")
    return discriminant


def cone_diagram(p: int, k: int, m: int, class_residue: int) -> ConeDiagram:
    """Signs of the class diagram over the window [-(max S + 2D), max S + 2D].

    Outside the window every sign is "-" on the left and "+" on the right.
    """
    discriminant = _check_positive(p, k, m)
    if not 0 <= class_residue < discriminant:
        raise InvalidParams(f"Class residue must lie in [0, {discriminant})")
    gradings = alexander_gradings(p, k)
    bound = gradings.max + 2 * discriminant
    first = class_residue - ((class_residue + bound) // discriminant) * discriminant
    positions = tuple(range(first, bound + 1, discriminant))
    return ConeDiagram(
        p=p,
        k=k,
        m=m,
        residue=class_residue,
        positions=positions,
        signs=tuple(_sign(x, gradings) for x in positions),
    )


def class_diagrams(p: int, k: int, m: int) -> list[ConeDiagram]:
    discriminant = _check_positive(p, k, m)
    return [cone_diagram(p, k, m, r) for r in range(discriminant)]


def render_signs(diagram: ConeDiagram) -> str:
    return " ".join(sign.value for sign in diagram.signs)


def _rref_mod2(matrix: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = (matrix.astype(np.uint8) & 1).copy()
    rows, columns = a.shape
    row = 0
    pivots: list[int] = []
    for column in range(columns):
        if row == rows:
            break
        candidates = np.flatnonzero(a[row:, column])
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            a[[row, pivot], :] = a[[pivot, row], :]
        for r in np.flatnonzero(a[:, column]):
            if r != row:
                a[r, :] ^= a[row, :]
        pivots.append(column)
        row += 1
    return a, pivots


def _nullspace_mod2(matrix: np.ndarray) -> list[np.ndarray]:
    reduced, pivots = _rref_mod2(matrix)
    columns = matrix.shape[1]
    free = [c for c in range(columns) if c not in set(pivots)]
    basis = []
    for column in free:
        x = np.zeros(columns, dtype=np.uint8)
        x[column] = 1
        for i, pivot in enumerate(pivots):
            x[pivot] = reduced[i, column]
        basis.append(x)
    return basis


def boundary_matrix(diagram: ConeDiagram) -> np.ndarray:
    """Map from the A-row to the B-row over the two element field.

    A-nodes sit at every window position, B-nodes at all but the first.
    """
    size = len(diagram.positions)
    matrix = np.zeros((size - 1, size), dtype=np.uint8)
    for i, sign in enumerate(diagram.signs):
        if sign in (Sign.circ, Sign.plus) and i >= 1:
            matrix[i - 1, i] = 1
        if sign in (Sign.circ, Sign.minus) and i + 1 < size:
            matrix[i, i] = 1
    return matrix


def summand_homology(diagram: ConeDiagram) -> SummandHomology:
    """Rank of the homology of the windowed cone and the A-positions carrying it."""
    matrix = boundary_matrix(diagram)
    b_nodes, a_nodes = matrix.shape
    _, pivots = _rref_mod2(matrix)
    rank = len(pivots)
    kernel = _nullspace_mod2(matrix)
    support = frozenset(
        diagram.positions[i] for vector in kernel for i in np.flatnonzero(vector)
    )
    return SummandHomology(rank=a_nodes + b_nodes - 2 * rank, top_support=support)


_ORDER = {Sign.minus: 0, Sign.circ: 1, Sign.plus: 2}


def _monotone(diagram: ConeDiagram) -> bool:
    order = [_ORDER[s] for s in diagram.signs]
    return all(a <= b for a, b in zip(order, order[1:]))


def is_well_ordered(p: int, k: int, m: int) -> bool:
    """Every class is a single [-, +] summand flanked by "-" and "+" tails.

    Equivalently, every sign row reads -...- o...o +...+.
    """
    well_ordered = all(_monotone(d) for d in class_diagrams(p, k, m))
    logger.debug("Checked well-orderedness", p=p, k=k, m=m, well_ordered=well_ordered)
    return well_ordered


def xi0_support_ok(p: int, k: int, m: int) -> bool:
    """The class of position 0 has rank one homology supported at A_0."""
    homology = summand_homology(cone_diagram(p, k, m, 0))
    return homology.rank == 1 and 0 in homology.top_support
