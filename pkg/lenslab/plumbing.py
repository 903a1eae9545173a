# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Negative definite plumbing graphs and their d-invariants.

Characteristic vectors are integer covectors w with coordinates
w_v = <w, [S_v]>; PD[S_v] is row v of the intersection form Q and
<w, w> = w Q^-1 w^T. Two characteristic vectors restrict to the same Spin^c
structure on the boundary iff Q^-1 (w - w') / 2 is integral.
"""
from collections.abc import Iterable
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import chain
from math import prod
from pathlib import Path

import numpy as np
import structlog
from more_itertools import first
from pydantic import BaseModel
from pydantic import StrictInt
from pydantic import ValidationError
from pydantic import root_validator
from pydantic import validator

from lenslab.exactlat import IntMatrix
from lenslab.exactlat import Rational
from lenslab.exactlat import RationalMatrix
from lenslab.exactlat import det
from lenslab.exactlat import inverse
from lenslab.exactlat import is_integral_vector
from lenslab.exactlat import is_negative_definite
from lenslab.exactlat import matvec
from lenslab.exactlat import quadratic_form
from lenslab.exceptions import ClassWithoutMaximiser
from lenslab.exceptions import CycleDetected
from lenslab.exceptions import EmptyBox
from lenslab.exceptions import InvalidParams
from lenslab.exceptions import NotApplicable
from lenslab.exceptions import PreconditionViolated

logger = structlog.stdlib.get_logger()

CharVector = tuple[int, ...]

# Box vectors are pushed down in numpy blocks of this many rows. Rows whose
# path is longer than the step limit are finished by `push_down_path`.
CHUNK_SIZE = 1 << 15
BULK_STEP_LIMIT = 4096

_ACTIVE = 0
_MAXIMISING = 1
_NON_MAXIMISING = 2


class GraphFamily(str, Enum):
    """Graphs built by `build_family_graph`.

    star is M for m >= k + 1. l5_k2, l7_k2 and l7_k3 describe M for small m
    at (p, k) = (5, 2), (7, 2) and (7, 3). cobordism is the linking graph of
    the surgery cobordism itself.
    """

    star = "star"
    l5_k2 = "l5_k2"
    l7_k2 = "l7_k2"
    l7_k3 = "l7_k3"
    cobordism = "cobordism"


class Edge(BaseModel):
    u: StrictInt
    v: StrictInt
    pairing: StrictInt = 1

    class Config:
        frozen = True


class PlumbingGraph(BaseModel):
    weights: tuple[StrictInt, ...]
    edges: tuple[Edge, ...] = ()
    family: GraphFamily | None = None
    # Representative of the self-conjugate class t_M and the covector s of
    # i*PD[mu]; adding i*PD[mu] shifts a characteristic vector by 2s.
    t_m: tuple[int, ...] | None = None
    mu_shift: tuple[int, ...] | None = None

    class Config:
        frozen = True

    @validator("weights")
    def check_nonempty(cls, weights: tuple[int, ...]) -> tuple[int, ...]:
        if not weights:
            raise ValueError("A plumbing graph needs at least one vertex")
        return weights

    @root_validator(skip_on_failure=True)
    def check_edges(cls, values: dict) -> dict:
        n = len(values["weights"])
        seen: set[tuple[int, int]] = set()
        normalised = []
        for edge in values["edges"]:
            if not (0 <= edge.u < n and 0 <= edge.v < n):
                raise ValueError(f"Edge ({edge.u}, {edge.v}) refers to a missing vertex")
            if edge.u == edge.v:
                raise ValueError(f"Self loop at vertex {edge.u}")
            key = (min(edge.u, edge.v), max(edge.u, edge.v))
            if key in seen:
                raise ValueError(f"Duplicate edge {key}")
            seen.add(key)
            normalised.append(Edge(u=key[0], v=key[1], pairing=edge.pairing))
        values["edges"] = tuple(sorted(normalised, key=lambda e: (e.u, e.v)))
        for name in ("t_m", "mu_shift"):
            vector = values.get(name)
            if vector is not None and len(vector) != n:
                raise ValueError(f"{name} must have one coordinate per vertex")
        return values

    @property
    def size(self) -> int:
        return len(self.weights)

    def degree(self, vertex: int) -> int:
        return sum(1 for e in self.edges if vertex in (e.u, e.v))


class SpincClass(BaseModel):
    """A Spin^c structure on the boundary, named by its canonical vector."""

    canonical: CharVector

    class Config:
        frozen = True


class PushDownResult(BaseModel):
    maximising: bool
    terminal: CharVector | None
    steps: int

    class Config:
        frozen = True


class DTableEntry(BaseModel):
    spinc: SpincClass
    d: Rational
    maximiser: CharVector

    class Config:
        frozen = True


class DTable(BaseModel):
    graph: PlumbingGraph
    entries: tuple[DTableEntry, ...]

    class Config:
        frozen = True

    def d_values(self) -> list[Fraction]:
        return [entry.d for entry in self.entries]

    def entry_for(self, w: Sequence[int]) -> DTableEntry:
        key = class_key(self.graph, tuple(w))
        return first(
            e for e in self.entries if class_key(self.graph, e.spinc.canonical) == key
        )

    def d(self, w: Sequence[int]) -> Fraction:
        return self.entry_for(w).d


@lru_cache(maxsize=256)
def intersection_form(graph: PlumbingGraph) -> IntMatrix:
    rows = [[0] * graph.size for _ in range(graph.size)]
    for vertex, weight in enumerate(graph.weights):
        rows[vertex][vertex] = weight
    for edge in graph.edges:
        rows[edge.u][edge.v] = edge.pairing
        rows[edge.v][edge.u] = edge.pairing
    return IntMatrix.of(rows)


@lru_cache(maxsize=256)
def _inverse_form(graph: PlumbingGraph) -> RationalMatrix:
    return inverse(intersection_form(graph))


def bad_vertices(graph: PlumbingGraph) -> frozenset[int]:
    return frozenset(
        v for v, weight in enumerate(graph.weights) if weight > -graph.degree(v)
    )


def is_characteristic(graph: PlumbingGraph, w: Sequence[int]) -> bool:
    return len(w) == graph.size and all(
        (x - weight) % 2 == 0 for x, weight in zip(w, graph.weights, strict=True)
    )


@lru_cache(maxsize=65536)
def class_key(graph: PlumbingGraph, w: CharVector) -> tuple[Fraction, ...]:
    """Fractional parts of Q^-1 w / 2, a complete invariant of the class of w."""
    return tuple((x / 2) % 1 for x in matvec(_inverse_form(graph), w))


def same_class(graph: PlumbingGraph, w: Sequence[int], w2: Sequence[int]) -> bool:
    difference = [a - b for a, b in zip(w, w2, strict=True)]
    return is_integral_vector(x / 2 for x in matvec(_inverse_form(graph), difference))


def square(graph: PlumbingGraph, w: Sequence[int]) -> Fraction:
    return quadratic_form(_inverse_form(graph), w)


def _box_bounds(graph: PlumbingGraph) -> tuple[np.ndarray, np.ndarray]:
    for vertex, weight in enumerate(graph.weights):
        if weight > -1:
            raise EmptyBox(vertex, weight)
    weights = np.array(graph.weights, dtype=np.int64)
    # omega + 2 <= w_v <= -omega in steps of two
    return weights + 2, -weights


def _decode_box(low: np.ndarray, radices: np.ndarray, start: int, stop: int) -> np.ndarray:
    index = np.arange(start, stop, dtype=np.int64)
    block = np.empty((stop - start, len(radices)), dtype=np.int64)
    for vertex in range(len(radices) - 1, -1, -1):
        block[:, vertex] = low[vertex] + 2 * (index % radices[vertex])
        index //= radices[vertex]
    return block


def char_box(graph: PlumbingGraph) -> list[CharVector]:
    """Characteristic vectors with omega(v) + 2 <= w_v <= -omega(v), in lexicographic order."""
    low, radices = _box_bounds(graph)
    total = prod(int(r) for r in radices)
    return [tuple(int(x) for x in row) for row in _decode_box(low, radices, 0, total)]


def push_down_path(graph: PlumbingGraph, w0: Sequence[int]) -> PushDownResult:
    """Follow the push-down path from w0, always pushing the lowest-index vertex.

    Raises:
        InvalidParams: If w0 is not characteristic.
        CycleDetected: If the path revisits a vector.
    """
    if not is_characteristic(graph, w0):
        raise InvalidParams(f"{tuple(w0)} is not a characteristic vector")
    q = intersection_form(graph)
    ceiling = [-weight for weight in graph.weights]
    w = list(w0)
    visited: set[CharVector] = set()
    steps = 0
    while True:
        if any(x > c for x, c in zip(w, ceiling, strict=True)):
            return PushDownResult(maximising=False, terminal=None, steps=steps)
        vertex = next((v for v, c in enumerate(ceiling) if w[v] == c), None)
        if vertex is None:
            return PushDownResult(maximising=True, terminal=tuple(w), steps=steps)
        state = tuple(w)
        if state in visited:
            raise CycleDetected(tuple(w0), steps)
        visited.add(state)
        w = [x + 2 * r for x, r in zip(w, q.rows[vertex], strict=True)]
        steps += 1


def _push_down_block(
    q: np.ndarray, ceiling: np.ndarray, block: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised push-down over a block of box vectors.

    Returns per-row status and the (possibly unfinished) end vectors.
    """
    w = block.copy()
    status = np.full(len(w), _ACTIVE, dtype=np.int8)
    active = np.arange(len(w))
    for _ in range(BULK_STEP_LIMIT):
        if active.size == 0:
            break
        rows = w[active]
        over = (rows > ceiling).any(axis=1)
        hits = rows == ceiling
        has_hit = hits.any(axis=1)
        status[active[over]] = _NON_MAXIMISING
        status[active[~over & ~has_hit]] = _MAXIMISING
        pushing = ~over & has_hit
        vertex = hits[pushing].argmax(axis=1)
        active = active[pushing]
        w[active] += 2 * q[vertex]
    return status, w


def maximising_initiators(
    graph: PlumbingGraph, threads: int = 1
) -> list[tuple[CharVector, CharVector]]:
    """Box vectors that initiate maximising paths, paired with their terminals."""
    low, radices = _box_bounds(graph)
    total = prod(int(r) for r in radices)
    q = intersection_form(graph).to_numpy()
    ceiling = -np.array(graph.weights, dtype=np.int64)

    def run(start: int) -> list[tuple[CharVector, CharVector]]:
        block = _decode_box(low, radices, start, min(start + CHUNK_SIZE, total))
        status, ends = _push_down_block(q, ceiling, block)
        found = []
        for row in np.flatnonzero(status != _NON_MAXIMISING):
            initiator = tuple(int(x) for x in block[row])
            if status[row] == _MAXIMISING:
                found.append((initiator, tuple(int(x) for x in ends[row])))
                continue
            result = push_down_path(graph, initiator)
            if result.maximising:
                assert result.terminal is not None
                found.append((initiator, result.terminal))
        return found

    starts = range(0, total, CHUNK_SIZE)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            blocks = list(executor.map(run, starts))
    else:
        blocks = [run(start) for start in starts]
    return list(chain.from_iterable(blocks))


def _check_preconditions(graph: PlumbingGraph) -> None:
    if not is_negative_definite(intersection_form(graph)):
        raise PreconditionViolated("Intersection form is not negative definite")
    bad = bad_vertices(graph)
    if len(bad) > 1:
        raise PreconditionViolated(f"Graph has {len(bad)} bad vertices: {sorted(bad)}")


def d_plumbed(graph: PlumbingGraph, threads: int = 1) -> DTable:
    """d-invariants of the boundary of a negative definite plumbing.

    d(t) = (max <w, w> + |G|) / 4 over characteristic vectors w in the class t.
    The maximum is attained by a box vector initiating a maximising path.

    Raises:
        PreconditionViolated: If Q is not negative definite or there is more
            than one bad vertex.
        ClassWithoutMaximiser: If the maximising initiators miss a class.
    """
    _check_preconditions(graph)
    order = abs(det(intersection_form(graph)))
    logger.info("Computing d-invariants", vertices=graph.size, order=order)

    best: dict[tuple[Fraction, ...], tuple[Fraction, CharVector]] = {}
    canonical: dict[tuple[Fraction, ...], CharVector] = {}
    for initiator, terminal in maximising_initiators(graph, threads):
        key = class_key(graph, initiator)
        value = square(graph, initiator)
        current = best.get(key)
        if current is None or (value, _neg(initiator)) > (current[0], _neg(current[1])):
            best[key] = (value, initiator)
        if key not in canonical or terminal < canonical[key]:
            canonical[key] = terminal

    if len(best) != order:
        raise ClassWithoutMaximiser(len(best), order)

    entries = sorted(
        (
            DTableEntry(
                spinc=SpincClass(canonical=canonical[key]),
                d=(value + graph.size) / 4,
                maximiser=maximiser,
            )
            for key, (value, maximiser) in best.items()
        ),
        key=lambda e: e.spinc.canonical,
    )
    logger.debug("Computed d-invariants", d_values=[str(e.d) for e in entries])
    return DTable(graph=graph, entries=tuple(entries))


def _neg(w: CharVector) -> CharVector:
    # Ties on <w, w> keep the lexicographically smallest maximiser.
    return tuple(-x for x in w)


def class_of(table: DTable, w: Sequence[int]) -> SpincClass:
    return table.entry_for(w).spinc


def self_conjugate_classes(graph: PlumbingGraph, threads: int = 1) -> frozenset[SpincClass]:
    table = d_plumbed(graph, threads)
    inverse_form = _inverse_form(graph)
    return frozenset(
        e.spinc
        for e in table.entries
        if is_integral_vector(matvec(inverse_form, e.spinc.canonical))
    )


def conjugate_class(table: DTable, spinc: SpincClass) -> SpincClass:
    return class_of(table, tuple(-x for x in spinc.canonical))


def mu_shifted_class(
    graph: PlumbingGraph, spinc: SpincClass, table: DTable | None = None
) -> SpincClass:
    """The class of t + i*PD[mu] for the class t.

    Raises:
        NotApplicable: If the graph has no designated mu vertex.
    """
    if graph.mu_shift is None:
        raise NotApplicable("Graph carries no mu-shift")
    if table is None:
        table = d_plumbed(graph)
    shifted = tuple(
        x + 2 * s for x, s in zip(spinc.canonical, graph.mu_shift, strict=True)
    )
    return class_of(table, shifted)


def _chain(start: int, length: int) -> list[Edge]:
    return [Edge(u=start + i, v=start + i + 1) for i in range(length - 1)]


def _unit(size: int, entries: dict[int, int]) -> tuple[int, ...]:
    return tuple(entries.get(i, 0) for i in range(size))


def _star(p: int, k: int, m: int) -> PlumbingGraph:
    if k < 2 or p - k - 1 < 1:
        raise InvalidParams(f"Star graph needs k >= 2 and p - k - 1 >= 1, got p={p}, k={k}")
    if m < k + 1:
        raise InvalidParams(f"Star graph needs m >= k + 1, got m={m}, k={k}")
    arms = (m - k - 1, p - k - 1, k - 1)
    offsets = (0, arms[0], arms[0] + arms[1])
    center = sum(arms)
    size = center + 1
    edges = list(chain.from_iterable(_chain(o, a) for o, a in zip(offsets, arms, strict=True)))
    # The last vertex of each arm is adjacent to the -3 center.
    edges += [Edge(u=o + a - 1, v=center) for o, a in zip(offsets, arms, strict=True) if a > 0]
    if k % 2 == 0:
        t_m = _unit(size, {offsets[2] + k // 2 - 1: 2, center: -1})
    else:
        t_m = _unit(size, {offsets[1] + (p - k) // 2 - 1: 2, center: -1})
    return PlumbingGraph(
        weights=(-2,) * center + (-3,),
        edges=tuple(edges),
        family=GraphFamily.star,
        t_m=t_m,
        mu_shift=_unit(size, {0: -1}) if arms[0] > 0 else None,
    )


def build_family_graph(family: GraphFamily, p: int, k: int, m: int) -> PlumbingGraph:
    """Plumbing graphs of the Seifert fibered spaces used by the essential engine.

    Raises:
        InvalidParams: Outside the parameter range of the family.
    """
    match family:
        case GraphFamily.star:
            return _star(p, k, m)
        case GraphFamily.l5_k2:
            if (p, k) != (5, 2) or m > -1:
                raise InvalidParams("l5_k2 requires (p, k) = (5, 2) and m <= -1")
            return PlumbingGraph(
                weights=(-2, -2, -2, m - 2, -2),
                edges=(Edge(u=0, v=1), Edge(u=1, v=4), Edge(u=2, v=4), Edge(u=3, v=4)),
                family=family,
                t_m=(2, 0, 0, -m, 0),
                mu_shift=(-1, 0, -1, 0, 0),
            )
        case GraphFamily.l7_k2:
            if (p, k) != (7, 2) or m > -1:
                raise InvalidParams("l7_k2 requires (p, k) = (7, 2) and m <= -1")
            return PlumbingGraph(
                weights=(-2, -2, -2, -2, -2, m - 2, -2),
                edges=(*_chain(0, 4), Edge(u=3, v=6), Edge(u=4, v=6), Edge(u=5, v=6)),
                family=family,
                t_m=(2, 0, 0, 0, 0, -m, 0),
                mu_shift=(-1, 0, 0, 0, -1, 0, 0),
            )
        case GraphFamily.l7_k3:
            if (p, k) != (7, 3) or m > 0:
                raise InvalidParams("l7_k3 requires (p, k) = (7, 3) and m <= 0")
            return PlumbingGraph(
                weights=(-2, -2, -2, -2, -2, m - 3, -2),
                edges=(
                    *_chain(0, 3),
                    Edge(u=2, v=6),
                    Edge(u=3, v=4),
                    Edge(u=4, v=6),
                    Edge(u=5, v=6),
                ),
                family=family,
                t_m=(0, 0, 0, 0, 2, -m - 1, 0),
                mu_shift=(0, -1, 0, 0, -1, 1, 0),
            )
        case GraphFamily.cobordism:
            if p < 2:
                raise InvalidParams("cobordism requires p >= 2")
            # Chain of p - 1 (-2)-vertices, then the m-framed vertex pairing k
            # times with the first chain vertex.
            return PlumbingGraph(
                weights=(-2,) * (p - 1) + (m,),
                edges=(*_chain(0, p - 1), Edge(u=0, v=p - 1, pairing=k)),
                family=family,
            )
    raise NotImplementedError(family)


def seifert_closed_form(
    family: GraphFamily, p: int, k: int, m: int
) -> tuple[Fraction, Fraction]:
    """Closed forms of d(M, t_M) and d(M, t_M + i*PD[mu])."""
    match family:
        case GraphFamily.star:
            if k < 2 or m < k + 3:
                raise InvalidParams("Star closed forms require k >= 2 and m >= k + 3")
            order = 4 * (p * m - k**2)
            if k % 2 == 0:
                return Fraction(m + p - 2 * k - 2, 4), Fraction(
                    p * m**2
                    - (6 * p + 2 * k * p - p**2 + k**2) * m
                    + 4 * p
                    + 6 * k**2
                    + 2 * k**3
                    - p * k**2,
                    order,
                )
            return Fraction(m - 2, 4), Fraction(
                p * m**2 - (6 * p + k**2) * m + 6 * k**2 + 4 * p, order
            )
        case GraphFamily.l5_k2:
            build_family_graph(family, p, k, m)
            return Fraction(m + 1, 4), Fraction(-5 * m**2 - 21 * m, 4 * (-5 * m + 4))
        case GraphFamily.l7_k2:
            build_family_graph(family, p, k, m)
            return Fraction(m + 3, 4), Fraction(-7 * m**2 - 45 * m, 4 * (-7 * m + 4))
        case GraphFamily.l7_k3:
            build_family_graph(family, p, k, m)
            return Fraction(m, 4), Fraction(
                -7 * m**2 - 19 * m + 8, 4 * (-7 * m + 9)
            )
    raise InvalidParams(f"No closed form for {family.value}")


class GraphFile(BaseModel):
    """JSON plumbing graph: {"vertices": [{"weight": -2}, ...], "edges": [[0, 1], ...]}."""

    class Vertex(BaseModel):
        weight: StrictInt

    vertices: list[Vertex]
    edges: list[tuple[StrictInt, StrictInt] | tuple[StrictInt, StrictInt, StrictInt]] = []

    def to_graph(self) -> PlumbingGraph:
        return PlumbingGraph(
            weights=tuple(v.weight for v in self.vertices),
            edges=tuple(
                Edge(u=e[0], v=e[1], pairing=e[2] if len(e) == 3 else 1) for e in self.edges
            ),
        )


def load_graph(source: Path | str) -> PlumbingGraph:
    """Parse a plumbing graph from a JSON file path or a JSON string.

    Raises:
        InvalidParams: On malformed documents, duplicate edges or bad indices.
    """
    if isinstance(source, Path):
        source = source.read_text()
    try:
        # parse_raw reports undecodable JSON as a ValidationError
        return GraphFile.parse_raw(source).to_graph()
    except ValidationError as e:
        raise InvalidParams(f"Invalid plumbing graph: {e}") from e


def graph_from_weights(
    weights: Iterable[int], edges: Iterable[tuple[int, int]] = ()
) -> PlumbingGraph:
    return PlumbingGraph(
        weights=tuple(weights), edges=tuple(Edge(u=u, v=v) for u, v in edges)
    )
