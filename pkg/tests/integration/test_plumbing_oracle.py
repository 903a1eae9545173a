# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from lenslab.exactlat import det
from lenslab.exactlat import inverse
from lenslab.obstruct import seifert_d_values
from lenslab.plumbing import GraphFamily
from lenslab.plumbing import PlumbingGraph
from lenslab.plumbing import build_family_graph
from lenslab.plumbing import d_plumbed
from lenslab.plumbing import graph_from_weights
from lenslab.plumbing import intersection_form
from lenslab.plumbing import maximising_initiators
from lenslab.surgery import SurgeryProblem

ClassKey = tuple[int, ...]
CHUNK_SIZE = 1 << 20
START_RADIUS = 3


def _adjugate(graph: PlumbingGraph) -> tuple[np.ndarray, int]:
    q = intersection_form(graph)
    determinant = det(q)
    rows = [[int(x * determinant) for x in row] for row in inverse(q)]
    return np.array(rows, dtype=np.int64), determinant


def _key(adjugate: np.ndarray, determinant: int, w: np.ndarray) -> ClassKey:
    # w ~ w' iff adj (w - w') is divisible by 2 det
    return tuple(int(x) for x in (adjugate @ w) % (2 * abs(determinant)))


def _merge_maxima(
    best: dict[ClassKey, int], keys: np.ndarray, values: np.ndarray, modulus: int
) -> None:
    if not len(values):
        return
    size = keys.shape[1]
    if modulus**size < 2**62:
        codes = keys @ (modulus ** np.arange(size, dtype=np.int64))
        unique, index = np.unique(codes, return_inverse=True)
        rows = [
            tuple(int(code) // modulus**i % modulus for i in range(size))
            for code in unique.tolist()
        ]
    else:
        unique, index = np.unique(keys, axis=0, return_inverse=True)
        rows = [tuple(row) for row in unique.tolist()]
    top = np.full(len(rows), np.iinfo(np.int64).min, dtype=np.int64)
    np.maximum.at(top, index.reshape(-1), values)
    for key, value in zip(rows, top.tolist(), strict=True):
        if key not in best or value > best[key]:
            best[key] = value


def oracle(
    graph: PlumbingGraph, radius: int
) -> tuple[dict[ClassKey, Fraction], dict[ClassKey, Fraction]]:
    """max (<w, w> + |G|) / 4 per class over |w_v| <= -omega(v) + 2 r.

    Returns the maxima for r = radius and r = radius + 1, from one sweep of the
    larger box.
    """
    adjugate, determinant = _adjugate(graph)
    sign = 1 if determinant > 0 else -1
    modulus = 2 * abs(determinant)
    weights = np.array(graph.weights, dtype=np.int64)
    low = weights - 2 * (radius + 1)
    counts = -weights + 2 * (radius + 1) + 1
    inner = -weights + 2 * radius
    total = int(np.prod(counts))

    best_inner: dict[ClassKey, int] = {}
    best_outer: dict[ClassKey, int] = {}
    for start in range(0, total, CHUNK_SIZE):
        index = np.arange(start, min(start + CHUNK_SIZE, total), dtype=np.int64)
        digits = np.empty((len(index), graph.size), dtype=np.int64)
        for v in reversed(range(graph.size)):
            index, digits[:, v] = np.divmod(index, counts[v])
        w = low + 2 * digits
        # <w, w> = w adj w / det; scaling by sign(det) keeps the order
        values = sign * np.einsum("ij,jk,ik->i", w, adjugate, w)
        keys = (w @ adjugate) % modulus
        _merge_maxima(best_outer, keys, values, modulus)
        mask = np.all(np.abs(w) <= inner, axis=1)
        _merge_maxima(best_inner, keys[mask], values[mask], modulus)

    def d_values(best: dict[ClassKey, int]) -> dict[ClassKey, Fraction]:
        return {
            key: (Fraction(value, abs(determinant)) + graph.size) / 4
            for key, value in best.items()
        }

    return d_values(best_inner), d_values(best_outer)


def assert_matches_oracle(graph: PlumbingGraph) -> None:
    table = d_plumbed(graph)
    adjugate, determinant = _adjugate(graph)
    expected = {
        _key(adjugate, determinant, np.array(entry.spinc.canonical, dtype=np.int64)): entry.d
        for entry in table.entries
    }
    assert len(expected) == abs(determinant)
    inner, outer = oracle(graph, START_RADIUS)
    assert inner == outer, graph.weights
    assert inner == expected, graph.weights


def random_tree(rng: random.Random) -> PlumbingGraph:
    size = rng.randint(1, 5)
    edges = [(rng.randrange(v), v) for v in range(1, size)]
    degrees = Counter(v for edge in edges for v in edge)
    # weight <= -degree keeps the form diagonally dominant with no bad vertex
    weights = [-max(2, degrees[v]) - rng.randint(0, 1) for v in range(size)]
    return graph_from_weights(weights, edges)


@pytest.mark.integration_test
@pytest.mark.parametrize("seed", range(20))
def test_random_trees_match_oracle(seed: int) -> None:
    assert_matches_oracle(random_tree(random.Random(seed)))


@pytest.mark.integration_test
@pytest.mark.parametrize(
    "family,p,k,m",
    [
        (GraphFamily.star, 5, 2, 3),
        (GraphFamily.star, 5, 2, 4),
        (GraphFamily.star, 5, 2, 5),
        (GraphFamily.star, 7, 2, 4),
        (GraphFamily.star, 7, 3, 5),
        (GraphFamily.l5_k2, 5, 2, -1),
        (GraphFamily.l5_k2, 5, 2, -2),
        (GraphFamily.l5_k2, 5, 2, -3),
        (GraphFamily.l7_k2, 7, 2, -1),
        (GraphFamily.l7_k2, 7, 2, -2),
        (GraphFamily.l7_k3, 7, 3, 0),
        (GraphFamily.l7_k3, 7, 3, -1),
    ],
)
def test_family_graphs_match_oracle(family: GraphFamily, p: int, k: int, m: int) -> None:
    graph = build_family_graph(family, p, k, m)
    assert graph.size <= 7
    assert_matches_oracle(graph)


@pytest.mark.integration_test
@pytest.mark.parametrize("p,k,m", [(5, 2, 5), (7, 2, 5), (7, 3, 6), (11, 3, 6)])
def test_star_maximiser_census(p: int, k: int, m: int) -> None:
    graph = build_family_graph(GraphFamily.star, p, k, m)
    initiators = [w for w, _ in maximising_initiators(graph)]
    assert len(initiators) == p * m - k**2

    ceiling = [-weight for weight in graph.weights]
    hits = Counter(
        sum(x == top for x, top in zip(w, ceiling, strict=True)) for w in initiators
    )
    # arm lengths around the centre
    a, b, c = m - k - 1, p - k - 1, k - 1
    assert hits == {0: 2, 1: 2 * (a + b + c) + 1, 2: a * b + a * c + b * c}

    # every initiator with two hits has the centre at -1 and its 2s in different arms
    arms = [range(0, a), range(a, a + b), range(a + b, a + b + c)]
    for w in initiators:
        twos = [v for v, x in enumerate(w[:-1]) if x == 2]
        if len(twos) == 2:
            assert w[-1] == -1
            assert len({i for i, arm in enumerate(arms) for v in twos if v in arm}) == 2


@pytest.mark.integration_test
@pytest.mark.parametrize(
    "p,k,m",
    [
        (5, 2, 5),
        (5, 2, 6),
        (5, 2, 7),
        (7, 2, 5),
        (7, 2, 6),
        (7, 3, 6),
        (7, 3, 7),
        (11, 3, 6),
        (11, 4, 7),
        (13, 2, 5),
        (5, 2, -1),
        (5, 2, -2),
        (5, 2, -3),
        (5, 2, -4),
        (7, 2, -1),
        (7, 2, -2),
        (7, 2, -3),
        (7, 3, 0),
        (7, 3, -1),
        (7, 3, -2),
        (7, 3, -3),
    ],
)
def test_closed_forms_match_plumbing(p: int, k: int, m: int) -> None:
    sp = SurgeryProblem.of(p, k, m)
    assert seifert_d_values(sp, use_plumbing=True) == seifert_d_values(sp)
