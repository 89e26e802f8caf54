"""Shared test oracles: exhaustive searches and an integer-programming margin
solver, all independent of the level-function machinery under test."""

from __future__ import annotations

import itertools
from collections.abc import Iterator

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

from popassign import (
    HousingMarket,
    Instance,
    Matching,
    delta,
    enumerate_perfect_matchings,
    instance_from_document,
    unpopularity_margin,
)
from popassign.cli import random_instance_document, random_market_document


def inst(doc: dict) -> Instance:
    return instance_from_document(doc)


def complete_doc(n: int, prefs: dict[str, dict]) -> dict:
    agents = [f"a{i}" for i in range(1, n + 1)]
    objects = [f"b{j}" for j in range(1, n + 1)]
    return {
        "agents": agents,
        "objects": objects,
        "edges": [[a, b] for a in agents for b in objects],
        "preferences": prefs,
    }


# -- exhaustive margin oracles ---------------------------------------------------


def brute_margin_of(instance: Instance, matching: Matching) -> int:
    return max(
        delta(instance, rival, matching)
        for rival in enumerate_perfect_matchings(instance)
    )


def brute_min_margin(instance: Instance) -> int | None:
    """Minimum unpopularity margin over all assignments, by full enumeration;
    None when the instance admits no perfect matching."""
    best: int | None = None
    for m in enumerate_perfect_matchings(instance):
        margin = unpopularity_margin(instance, m).margin
        if best is None or margin < best:
            best = margin
            if best == 0:
                break
    return best


def brute_popular_exists(instance: Instance) -> bool:
    return brute_min_margin(instance) == 0


# -- corpus builders -------------------------------------------------------------

STYLES = ("strict", "weak", "partial")


def corpus(
    count: int,
    min_n: int = 2,
    max_n: int = 6,
    seed0: int = 0,
    square: bool = True,
) -> Iterator[Instance]:
    """A deterministic stream of random instances cycling over sizes,
    densities, and preference styles."""
    densities = (0.4, 0.65, 0.9)
    for i in range(count):
        n = min_n + i % (max_n - min_n + 1)
        m = n if square else max(1, n - 1 + (i % 3))
        style = STYLES[i % 3]
        density = densities[(i // 3) % 3]
        doc = random_instance_document(n, m, density, style, seed0 + i)
        yield instance_from_document(doc)


def market_corpus(count: int, max_n: int = 5, seed0: int = 0) -> Iterator[HousingMarket]:
    from popassign import market_from_document

    for i in range(count):
        n = 2 + i % (max_n - 1)
        density = (0.3, 0.5, 0.8)[i % 3]
        yield market_from_document(random_market_document(n, density, seed0 + i))


# -- exact minimum margin via integer programming --------------------------------


def milp_min_margin(instance: Instance) -> int | None:
    """Exact minimum unpopularity margin over all assignments, as an integer
    program: binary x picks a perfect matching, integer duals certify its
    margin, and the certificate total is minimized.  Independent of both the
    level solver and the enumeration oracles.  None when no assignment exists.
    """
    n = instance.n_agents
    if n != instance.n_objects:
        return None
    edges = instance.edge_indices
    m = len(edges)
    edge_pos = {e: i for i, e in enumerate(edges)}
    n_vars = m + 2 * n  # x_e, alpha_a, alpha_b
    c = np.concatenate([np.zeros(m), np.ones(2 * n)])

    rows: list = []
    lo: list[float] = []
    hi: list[float] = []

    def add(row: dict[int, float], low: float, high: float) -> None:
        rows.append(row)
        lo.append(low)
        hi.append(high)

    for ai in range(n):
        add({edge_pos[(ai, bj)]: 1.0 for bj in instance.adj_indices(ai)}, 1.0, 1.0)
    for bj in range(n):
        add(
            {edge_pos[(ai, bj)]: 1.0 for ai in instance.object_adj_indices(bj)},
            1.0,
            1.0,
        )
    agents, objects = instance.agents, instance.objects
    for ai, bj in edges:
        row: dict[int, float] = {m + ai: 1.0, m + n + bj: 1.0}
        b = objects[bj]
        for bj2 in instance.adj_indices(ai):
            if bj2 == bj:
                continue
            b2 = objects[bj2]
            if instance.prefers(agents[ai], b, b2):
                s = 1.0
            elif instance.prefers(agents[ai], b2, b):
                s = -1.0
            else:
                continue
            row[edge_pos[(ai, bj2)]] = row.get(edge_pos[(ai, bj2)], 0.0) - s
        add(row, 0.0, np.inf)

    mat = lil_matrix((len(rows), n_vars))
    for r, row in enumerate(rows):
        for col, val in row.items():
            mat[r, col] = val
    lower = np.concatenate([np.zeros(m), np.zeros(n), -np.full(n, n - 1)])
    upper = np.concatenate([np.ones(m), np.full(n, n), np.zeros(n)])
    result = milp(
        c,
        constraints=LinearConstraint(mat.tocsr(), np.array(lo), np.array(hi)),
        integrality=np.ones(n_vars),
        bounds=Bounds(lower, upper),
    )
    if not result.success:
        return None
    return round(result.fun)


# -- housing-market election, straight from the market definition ----------------


Arc = tuple[str, str]


def _arc_closure(market: HousingMarket, agent: str) -> set[tuple[Arc, Arc]]:
    pairs = market.preferences.get(agent, ())
    succ: dict[Arc, set[Arc]] = {}
    for hi, lo2 in pairs:
        succ.setdefault(hi, set()).add(lo2)
    closed: set[tuple[Arc, Arc]] = set()
    for node in succ:
        stack = list(succ[node])
        while stack:
            cur = stack.pop()
            if (node, cur) in closed:
                continue
            closed.add((node, cur))
            stack.extend(succ.get(cur, ()))
    return closed


def market_vote(
    market: HousingMarket,
    closures: dict[str, set],
    agent: str,
    new_arc: tuple | None,
    old_arc: tuple | None,
) -> int:
    """+1 if the agent prefers the new outcome, -1 the old, else 0; staying
    put (no arc) is strictly worse than trading along any outgoing arc."""
    if new_arc == old_arc:
        return 0
    if old_arc is None:
        return 1
    if new_arc is None:
        return -1
    closed = closures[agent]
    if (new_arc, old_arc) in closed:
        return 1
    if (old_arc, new_arc) in closed:
        return -1
    return 0


def enumerate_allocations(market: HousingMarket) -> Iterator[tuple[tuple, ...]]:
    """All arc subsets forming vertex-disjoint directed cycles, the empty one
    included."""
    succ: dict[str, list[str]] = {a: [] for a in market.agents}
    for x, y in market.arcs:
        succ[x].append(y)
    cycles: list[tuple[Arc, ...]] = []

    def extend(path: list[str], start: str) -> None:
        cur = path[-1]
        for nxt in sorted(succ[cur]):
            if nxt == start and len(path) >= 2:
                cycles.append(tuple((path[i], path[i + 1]) for i in range(len(path) - 1)) + ((cur, start),))
            elif nxt > start and nxt not in path:
                extend(path + [nxt], start)

    for a in sorted(market.agents):
        extend([a], a)

    def rec(i: int, used: frozenset, chosen: tuple) -> Iterator[tuple[Arc, ...]]:
        yield tuple(sorted(itertools.chain.from_iterable(chosen)))
        for j in range(i, len(cycles)):
            nodes = {x for x, _ in cycles[j]}
            if nodes & used:
                continue
            yield from rec(j + 1, used | frozenset(nodes), chosen + (cycles[j],))

    yield from rec(0, frozenset(), ())


def brute_popular_allocations(market: HousingMarket) -> list[tuple[tuple, ...]]:
    """All popular allocations, by running the full pairwise election."""
    closures = {a: _arc_closure(market, a) for a in market.agents}
    allocations = list(enumerate_allocations(market))
    outgoing = []
    for alloc in allocations:
        arc_of = {x: (x, y) for x, y in alloc}
        outgoing.append(arc_of)
    popular = []
    for i, alloc in enumerate(allocations):
        beaten = False
        for j, rival in enumerate(allocations):
            if i == j:
                continue
            tally = sum(
                market_vote(
                    market,
                    closures,
                    a,
                    outgoing[j].get(a),
                    outgoing[i].get(a),
                )
                for a in market.agents
            )
            if tally > 0:
                beaten = True
                break
        if not beaten:
            popular.append(alloc)
    return popular
