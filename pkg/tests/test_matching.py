import itertools

import pytest
from hypothesis import given, strategies as st

from popassign import (
    BipartiteGraph,
    InfeasibleMatchingError,
    WeightedBipartiteGraph,
    max_weight_perfect_matching,
    maximum_matching,
)


def brute_max_matching_size(adjacency: list[list[int]], n_right: int) -> int:
    best = 0
    rows = list(enumerate(adjacency))

    def rec(i: int, used: int, size: int) -> None:
        nonlocal best
        best = max(best, size)
        if i == len(rows):
            return
        rec(i + 1, used, size)
        for b in rows[i][1]:
            if not used >> b & 1:
                rec(i + 1, used | (1 << b), size + 1)

    rec(0, 0, 0)
    return best


def brute_best_perfect(edges: list[dict[int, int]], n: int):
    best = None
    for perm in itertools.permutations(range(n)):
        total = 0
        ok = True
        for i, j in enumerate(perm):
            if j not in edges[i]:
                ok = False
                break
            total += edges[i][j]
        if ok and (best is None or total > best):
            best = total
    return best


@st.composite
def adjacency_lists(draw):
    n_left = draw(st.integers(0, 5))
    n_right = draw(st.integers(1, 5))
    adj = [
        sorted(
            draw(
                st.sets(st.integers(0, n_right - 1), max_size=n_right)
            )
        )
        for _ in range(n_left)
    ]
    return adj, n_right


@given(adjacency_lists())
def test_maximum_matching_size_matches_brute_force(data):
    adj, n_right = data
    graph = BipartiteGraph(len(adj), n_right, adj)
    match_l, match_r = maximum_matching(graph)
    size = sum(1 for x in match_l if x != -1)
    assert size == brute_max_matching_size(adj, n_right)
    # consistency of the two sides
    for i, j in enumerate(match_l):
        if j != -1:
            assert match_r[j] == i
            assert j in adj[i]


def test_maximum_matching_deterministic():
    adj = [[0, 1], [0, 1], [1, 2]]
    g = BipartiteGraph(3, 3, adj)
    assert maximum_matching(g) == maximum_matching(g)


def test_graph_validation():
    with pytest.raises(ValueError):
        BipartiteGraph(1, 1, [[1]])  # column out of range
    with pytest.raises(ValueError):
        BipartiteGraph(2, 1, [[0]])  # row count mismatch
    with pytest.raises(ValueError):
        WeightedBipartiteGraph(1, 1, [{0: 1.5}])  # non-integer weight


@st.composite
def weighted_squares(draw):
    n = draw(st.integers(1, 5))
    rows = []
    for _ in range(n):
        cols = draw(st.sets(st.integers(0, n - 1), min_size=0, max_size=n))
        rows.append({j: draw(st.integers(-3, 3)) for j in cols})
    return n, rows


@given(weighted_squares())
def test_max_weight_perfect_matching_matches_brute_force(data):
    n, rows = data
    graph = WeightedBipartiteGraph(n, n, rows)
    expected = brute_best_perfect(rows, n)
    if expected is None:
        with pytest.raises(InfeasibleMatchingError):
            max_weight_perfect_matching(graph)
        return
    match, total = max_weight_perfect_matching(graph)
    assert total == expected
    assert sorted(match) == list(range(n))
    assert sum(rows[i][j] for i, j in enumerate(match)) == total


def test_max_weight_requires_square():
    with pytest.raises(InfeasibleMatchingError):
        max_weight_perfect_matching(WeightedBipartiteGraph(2, 1, [{0: 1}, {0: 1}]))


def test_max_weight_prefers_heavier():
    rows = [{0: 1, 1: 5}, {0: 2, 1: 4}]
    match, total = max_weight_perfect_matching(WeightedBipartiteGraph(2, 2, rows))
    assert total == 7 and match == [1, 0]
