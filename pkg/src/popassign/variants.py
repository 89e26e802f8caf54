"""Solver variants: forced/forbidden edges, bounded unpopularity margin, and
penalty-vote assignments.

All of these reuse the level loop from :mod:`popassign.popular`:

* Forced edges are rewritten into forbidden sibling edges (forcing ``(a, b)``
  means forbidding every other edge at ``a``); the loop then matches in the
  level graph minus the forbidden set.
* The bounded-margin search guesses, for each total budget ``t <= k``, a
  multiset of edges carrying positive *load* (their admissibility thresholds
  relax by the load, and their siblings are forbidden), and runs the loop per
  guess.  Guesses are enumerated in a fixed order -- ascending total load,
  then lexicographic by the edge-index multiset -- so the first hit is
  deterministic even when branches run on a thread pool.
* An assignment popular with penalty ``kappa`` (unmatched agents in rival
  matchings count ``kappa`` votes instead of one) is exactly what the level
  loop truncated at ``kappa + 1`` decides, so that variant is a direct
  delegation.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

from .instance import Instance, InstanceError, Matching
from .matching import BipartiteGraph, maximum_matching
from .popular import (
    DualCertificate,
    LevelFunction,
    SolveOutcome,
    _edge_feasible,
    _level_masks,
    _loop_outcome,
    _require_perfectly_matchable,
    _run_level_loop,
    make_level_function,
    solve_truncated,
)


@dataclass(frozen=True)
class EdgeConstraints:
    """Forced and forbidden edge sets for the constrained solver."""

    forced: frozenset[tuple[str, str]] = frozenset()
    forbidden: frozenset[tuple[str, str]] = frozenset()

    @classmethod
    def of(
        cls,
        forced: Iterable[tuple[str, str]] = (),
        forbidden: Iterable[tuple[str, str]] = (),
    ) -> "EdgeConstraints":
        return cls(frozenset(tuple(e) for e in forced), frozenset(tuple(e) for e in forbidden))


def _check_constraints(instance: Instance, constraints: EdgeConstraints) -> None:
    for kind, edges in (("forced", constraints.forced), ("forbidden", constraints.forbidden)):
        for a, b in edges:
            if not instance.has_edge(a, b):
                raise InstanceError(f"{kind} edge ({a!r}, {b!r}) is not an instance edge")
    seen_agents: set[str] = set()
    seen_objects: set[str] = set()
    for a, b in constraints.forced:
        if a in seen_agents:
            raise InstanceError(f"two forced edges share agent {a!r}")
        if b in seen_objects:
            raise InstanceError(f"two forced edges share object {b!r}")
        seen_agents.add(a)
        seen_objects.add(b)


def forced_to_forbidden(
    instance: Instance, constraints: EdgeConstraints
) -> frozenset[tuple[str, str]]:
    """Rewrite constraints into a pure forbidden set: forcing ``(a, b)``
    forbids every other edge incident to ``a``."""
    _check_constraints(instance, constraints)
    forbidden = set(constraints.forbidden)
    for a, b in constraints.forced:
        forbidden.update((a, b2) for b2 in instance.neighbors(a) if b2 != b)
    return frozenset(forbidden)


def solve_with_constraints(
    instance: Instance,
    constraints: EdgeConstraints,
    max_level: int | None = None,
) -> SolveOutcome:
    """Find an assignment that contains every forced edge, avoids every
    forbidden edge, and is popular (among all assignments), or report that
    none exists.

    ``max_level`` optionally truncates the level loop as in
    :func:`popassign.popular.solve_truncated`.  Unsatisfiable constraints
    (including a forced edge that is also forbidden) surface as a not-found
    outcome, not an error.
    """
    if max_level is not None and max_level < 0:
        raise ValueError("max_level must be non-negative")
    forbidden_names = forced_to_forbidden(instance, constraints)
    _require_perfectly_matchable(instance)
    forbidden = frozenset(
        (instance.agent_index(a), instance.object_index(b)) for a, b in forbidden_names
    )
    cap = instance.n_objects if max_level is None else min(max_level, instance.n_objects)
    result = _run_level_loop(instance, cap, forbidden=forbidden)
    return _loop_outcome(instance, result, cap)


def lambda_feasible(
    instance: Instance,
    level_function: LevelFunction | Iterable[int],
    edge: tuple[str, str],
    load: int,
) -> bool:
    """Is ``edge`` admissible at the given levels when it is allowed to carry
    ``load``?  Load zero is exactly membership in the plain level graph."""
    if load < 0:
        raise ValueError("load must be non-negative")
    if not isinstance(level_function, LevelFunction):
        level_function = make_level_function(instance, level_function)
    a, b = edge
    ai = instance.agent_index(a)
    bj = instance.object_index(b)
    if not instance.has_edge(a, b):
        raise InstanceError(f"({a!r}, {b!r}) is not an instance edge")
    masks = _level_masks(level_function.levels)
    return _edge_feasible(
        instance,
        level_function.levels,
        masks,
        ai,
        level_function.max_neighbor_level[ai],
        bj,
        load,
    )


@dataclass(frozen=True)
class LoadCapacity:
    """Positive per-edge load allowances (sparse; absent edges carry zero)."""

    loads: Mapping[tuple[str, str], int]

    def __post_init__(self) -> None:
        for edge, load in self.loads.items():
            if not isinstance(load, int) or load < 1:
                raise ValueError(f"load for edge {edge!r} must be a positive integer")

    @property
    def total(self) -> int:
        return sum(self.loads.values())


@dataclass(frozen=True)
class KMarginOutcome:
    """Result of the bounded-margin search.

    When found, ``certified_bound`` is the sum of all certificate values --
    the total load on matched edges -- and no rival assignment can beat the
    returned one by more than that in a head-to-head vote.  ``branches``
    counts load guesses examined (in enumeration order) up to and including
    the successful one.
    """

    found: bool
    assignment: Matching | None
    loads: LoadCapacity | None
    levels: LevelFunction | None
    certificate: DualCertificate | None
    certified_bound: int | None
    branches: int


def _perfect_without(instance: Instance, forbidden: set[tuple[int, int]]) -> bool:
    rows = [
        [bj for bj in instance.adj_indices(ai) if (ai, bj) not in forbidden]
        for ai in range(instance.n_agents)
    ]
    graph = BipartiteGraph(instance.n_agents, instance.n_objects, rows)
    match_l, _ = maximum_matching(graph)
    return -1 not in match_l


def _run_margin_branch(instance: Instance, combo: tuple[int, ...]):
    """Run the level loop for one load guess (a multiset of edge indices).
    Returns the found pieces, or None if this branch yields nothing."""
    edge_indices = instance.edge_indices
    loads: dict[tuple[int, int], int] = {}
    for idx in combo:
        e = edge_indices[idx]
        loads[e] = loads.get(e, 0) + 1
    forbidden = {
        (ai, bj2)
        for (ai, bj) in loads
        for bj2 in instance.adj_indices(ai)
        if bj2 != bj
    }
    # Positive-load edges act as forced edges; if forbidding their siblings
    # already kills perfect matchability, the level loop could only time out.
    if forbidden and not _perfect_without(instance, forbidden):
        return None
    result = _run_level_loop(
        instance, instance.n_objects, loads=loads, forbidden=frozenset(forbidden)
    )
    if result.match_l is None:
        return None
    level_function = make_level_function(instance, result.levels)
    levels = level_function.levels
    pairs = []
    alpha_agents: dict[str, int] = {}
    bound = 0
    for ai, bj in enumerate(result.match_l):
        a = instance.agents[ai]
        b = instance.objects[bj]
        pairs.append((a, b))
        load = loads.get((ai, bj), 0)
        bound += load
        alpha_agents[a] = levels[bj] + load
    alpha_objects = {b: -levels[j] for j, b in enumerate(instance.objects)}
    named_loads = {
        (instance.agents[ai], instance.objects[bj]): load
        for (ai, bj), load in sorted(loads.items())
    }
    return (
        Matching(pairs),
        LoadCapacity(named_loads),
        level_function,
        DualCertificate(alpha_agents, alpha_objects),
        bound,
    )


def solve_k_margin(
    instance: Instance, k: int, parallel_branches: int = 1
) -> KMarginOutcome:
    """Find an assignment whose unpopularity margin is at most ``k``, or
    report that none exists.

    Enumerates load guesses of total ``0..k`` over the edges (ascending
    total, then lexicographic by edge-index multiset); the first successful
    branch in that order wins.  ``parallel_branches`` > 1 runs branches on a
    thread pool in windows, still collecting results in enumeration order.

    Raises :class:`popassign.popular.NoPerfectMatchingError` if the instance
    admits no perfect matching at all.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if parallel_branches < 1:
        raise ValueError("parallel_branches must be at least 1")
    _require_perfectly_matchable(instance)
    m = len(instance.edge_indices)
    combos = itertools.chain.from_iterable(
        itertools.combinations_with_replacement(range(m), t) for t in range(k + 1)
    )
    branches = 0
    if parallel_branches == 1:
        for combo in combos:
            branches += 1
            hit = _run_margin_branch(instance, combo)
            if hit is not None:
                assignment, loads, level_function, certificate, bound = hit
                return KMarginOutcome(
                    True, assignment, loads, level_function, certificate, bound, branches
                )
    else:
        window_size = parallel_branches * 4
        with ThreadPoolExecutor(max_workers=parallel_branches) as pool:
            while True:
                window = list(itertools.islice(combos, window_size))
                if not window:
                    break
                futures = [pool.submit(_run_margin_branch, instance, c) for c in window]
                for future in futures:
                    branches += 1
                    hit = future.result()
                    if hit is not None:
                        assignment, loads, level_function, certificate, bound = hit
                        return KMarginOutcome(
                            True,
                            assignment,
                            loads,
                            level_function,
                            certificate,
                            bound,
                            branches,
                        )
    return KMarginOutcome(False, None, None, None, None, None, branches)


def solve_penalty_assignment(instance: Instance, kappa: int) -> SolveOutcome:
    """Find an assignment that is popular with penalty ``kappa`` against
    every matching of the instance (rival matchings may leave agents
    unmatched; each such agent costs the rival ``kappa`` votes).

    Equivalent to the level loop truncated at ``kappa + 1``; with ``kappa``
    at least the number of objects this coincides with plain popularity.
    """
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    return solve_truncated(instance, kappa + 1)
