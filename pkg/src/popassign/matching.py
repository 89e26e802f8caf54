"""Deterministic bipartite matching kernels.

This module is purely index-based: vertices on each side are numbered from
zero, and callers translate between names and indices.  Both algorithms here
are deterministic -- given the same graph (including adjacency order) they
return the same matching, with ties broken towards lower vertex indices.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Mapping, Sequence, Tuple

INF = float("inf")


class InfeasibleMatchingError(ValueError):
    """Raised when a perfect matching is required but none exists."""


class BipartiteGraph:
    """An unweighted bipartite graph in adjacency-list form.

    ``adjacency[i]`` lists the right-side neighbors of left vertex ``i``.
    The adjacency order is preserved; it determines the order in which
    augmenting searches scan edges.
    """

    __slots__ = ("n_left", "n_right", "adjacency")

    def __init__(self, n_left: int, n_right: int, adjacency: Sequence[Sequence[int]]) -> None:
        if len(adjacency) != n_left:
            raise ValueError(
                f"adjacency has {len(adjacency)} rows for {n_left} left vertices"
            )
        for i, row in enumerate(adjacency):
            for r in row:
                if not 0 <= r < n_right:
                    raise ValueError(f"right vertex {r} of left vertex {i} out of range")
        self.n_left = n_left
        self.n_right = n_right
        self.adjacency = tuple(tuple(row) for row in adjacency)


class WeightedBipartiteGraph:
    """A bipartite graph with integer edge weights.

    ``edges[i]`` maps right indices to weights.  Pairs absent from the
    mapping are genuine non-edges; there is no minus-infinity placeholder
    involved anywhere, and :func:`max_weight_perfect_matching` reports
    infeasibility explicitly instead.
    """

    __slots__ = ("n_left", "n_right", "edges")

    def __init__(self, n_left: int, n_right: int, edges: Sequence[Mapping[int, int]]) -> None:
        if len(edges) != n_left:
            raise ValueError(f"edges has {len(edges)} rows for {n_left} left vertices")
        rows: List[Dict[int, int]] = []
        for i, row in enumerate(edges):
            for r, w in row.items():
                if not 0 <= r < n_right:
                    raise ValueError(f"right vertex {r} of left vertex {i} out of range")
                if not isinstance(w, int):
                    raise ValueError(f"weight of edge ({i}, {r}) must be an integer")
            rows.append(dict(row))
        self.n_left = n_left
        self.n_right = n_right
        self.edges = rows


def maximum_matching(graph: BipartiteGraph) -> Tuple[List[int], List[int]]:
    """Hopcroft--Karp maximum matching.

    Returns ``(match_left, match_right)`` where ``match_left[i]`` is the
    right vertex matched to left vertex ``i`` (``-1`` if unmatched) and
    symmetrically for ``match_right``.

    The search is deterministic: breadth-first layers grow from free left
    vertices in index order and the augmenting depth-first search scans
    adjacency lists in their stored order, so lower indices win ties.
    """
    n_left, n_right = graph.n_left, graph.n_right
    adjacency = graph.adjacency
    match_l: List[int] = [-1] * n_left
    match_r: List[int] = [-1] * n_right
    dist: List[float] = [INF] * n_left

    def bfs() -> bool:
        queue = deque()
        for i in range(n_left):
            if match_l[i] == -1:
                dist[i] = 0
                queue.append(i)
            else:
                dist[i] = INF
        reachable_free = False
        while queue:
            i = queue.popleft()
            for r in adjacency[i]:
                i2 = match_r[r]
                if i2 == -1:
                    reachable_free = True
                elif dist[i2] == INF:
                    dist[i2] = dist[i] + 1
                    queue.append(i2)
        return reachable_free

    def dfs(i: int) -> bool:
        for r in adjacency[i]:
            i2 = match_r[r]
            if i2 == -1 or (dist[i2] == dist[i] + 1 and dfs(i2)):
                match_l[i] = r
                match_r[r] = i
                return True
        dist[i] = INF
        return False

    while bfs():
        for i in range(n_left):
            if match_l[i] == -1:
                dfs(i)
    return match_l, match_r


def max_weight_perfect_matching(graph: WeightedBipartiteGraph) -> Tuple[List[int], int]:
    """Maximum-weight perfect matching via the Hungarian method with
    potentials (successive shortest paths).

    Returns ``(match_left, total_weight)`` with ``match_left[i]`` the right
    vertex assigned to left vertex ``i``.  Only real edges are relaxed --
    the sparse edge maps are honored as-is -- and if at any point no
    remaining column is reachable the graph has no perfect matching, which
    raises :class:`InfeasibleMatchingError`.

    Deterministic: among columns at equal reduced cost the lowest index is
    chosen (strict-less scan).
    """
    n = graph.n_left
    if graph.n_right != n:
        raise InfeasibleMatchingError(
            f"perfect matching impossible: {n} left vertices, {graph.n_right} right"
        )
    if n == 0:
        return [], 0
    # Internally this minimizes cost = -weight.
    cost: List[Dict[int, int]] = [
        {j: -w for j, w in graph.edges[i].items()} for i in range(n)
    ]
    u = [0] * n  # left potentials
    v = [0] * (n + 1)  # right potentials; column n is the virtual start column
    p = [-1] * (n + 1)  # p[j] = row currently assigned to column j
    way = [n] * (n + 1)

    for i in range(n):
        p[n] = i
        j0 = n
        minv: List[float] = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = cost[i0]
            ui0 = u[i0]
            for j, c in row.items():
                if not used[j]:
                    cur = c - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
            delta = INF
            j1 = -1
            for j in range(n):
                if not used[j] and minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            if j1 < 0:
                raise InfeasibleMatchingError("graph admits no perfect matching")
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == -1:
                break
        while j0 != n:
            j_prev = way[j0]
            p[j0] = p[j_prev]
            j0 = j_prev

    match = [-1] * n
    total = 0
    for j in range(n):
        i = p[j]
        match[i] = j
        total += graph.edges[i][j]
    return match, total
