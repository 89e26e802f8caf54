"""Independent verification oracles.

Everything here checks solver output by routes that share no code with the
level loop: head-to-head vote tallies between explicit matchings, exhaustive
enumeration on small instances, a maximum-weight-matching computation of the
exact unpopularity margin, direct dual-certificate checking, and the
classical first/second-choice-edge characterization of popular matchings
under weak rankings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .instance import (
    Instance,
    InstanceError,
    Matching,
    MatchingError,
    check_assignment,
    check_matching,
)
from .matching import (
    BipartiteGraph,
    WeightedBipartiteGraph,
    max_weight_perfect_matching,
    maximum_matching,
)
from .popular import DualCertificate, NoPerfectMatchingError


class CapExceededError(RuntimeError):
    """An enumeration oracle was asked to run beyond its instance-size cap."""


@dataclass(frozen=True)
class EnumerationCaps:
    """Size caps for the exhaustive oracles (numbers of agents/objects per
    side).  Beyond these, enumeration is refused rather than attempted."""

    perfect_side: int = 8
    all_matchings_side: int = 6


DEFAULT_CAPS = EnumerationCaps()


def edge_weight(instance: Instance, matching: Matching, edge: tuple[str, str]) -> int:
    """The vote of ``edge``'s agent on the object of ``edge`` versus her
    current partner: +1 if she prefers the object, -1 if she prefers her
    partner, 0 under indifference.  The agent must be matched."""
    a, b = edge
    if not instance.has_edge(a, b):
        raise InstanceError(f"({a!r}, {b!r}) is not an instance edge")
    partner = matching.object_for(a)
    if partner is None:
        raise MatchingError(f"agent {a!r} is unmatched; edge weights are undefined")
    if b == partner:
        return 0
    if instance.prefers(a, b, partner):
        return 1
    if instance.prefers(a, partner, b):
        return -1
    return 0


def vote_with_penalty(
    instance: Instance, agent: str, new: Matching, old: Matching, kappa: int
) -> int:
    """One agent's vote comparing matchings ``new`` and ``old`` with penalty
    ``kappa``: +-1 between two partners, +-``kappa`` when exactly one side
    leaves the agent unmatched, 0 otherwise."""
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    bn = new.object_for(agent)
    bo = old.object_for(agent)
    if bn is not None and bo is not None:
        if bn == bo:
            return 0
        if instance.prefers(agent, bn, bo):
            return 1
        if instance.prefers(agent, bo, bn):
            return -1
        return 0
    if bn is not None:
        return kappa
    if bo is not None:
        return -kappa
    return 0


def delta(instance: Instance, new: Matching, old: Matching) -> int:
    """The head-to-head tally between two matchings: agents preferring
    ``new`` minus agents preferring ``old``, where being matched beats being
    unmatched by one vote."""
    check_matching(instance, new)
    check_matching(instance, old)
    return sum(
        vote_with_penalty(instance, a, new, old, 1) for a in instance.agents
    )


def total_vote_with_penalty(
    instance: Instance, new: Matching, old: Matching, kappa: int
) -> int:
    """Sum of all agents' penalty-``kappa`` votes for ``new`` over ``old``."""
    check_matching(instance, new)
    check_matching(instance, old)
    return sum(
        vote_with_penalty(instance, a, new, old, kappa) for a in instance.agents
    )


@dataclass(frozen=True)
class MarginReport:
    """An unpopularity margin together with a rival assignment attaining it."""

    margin: int
    witness: Matching


def unpopularity_margin(instance: Instance, matching: Matching) -> MarginReport:
    """The exact unpopularity margin of an assignment: the best head-to-head
    tally any rival assignment achieves against it.  Zero means popular.

    Computed as a maximum-weight perfect matching under per-edge vote
    weights; no enumeration and no level loop involved.
    """
    check_assignment(instance, matching)
    n = instance.n_agents
    rows = []
    for ai in range(n):
        a = instance.agents[ai]
        rows.append(
            {
                bj: edge_weight(instance, matching, (a, instance.objects[bj]))
                for bj in instance.adj_indices(ai)
            }
        )
    graph = WeightedBipartiteGraph(n, instance.n_objects, rows)
    match, total = max_weight_perfect_matching(graph)
    witness = Matching(
        (instance.agents[ai], instance.objects[bj]) for ai, bj in enumerate(match)
    )
    return MarginReport(total, witness)


def enumerate_perfect_matchings(
    instance: Instance, caps: EnumerationCaps = DEFAULT_CAPS
) -> Iterator[Matching]:
    """Yield every assignment (perfect matching) of the instance, in
    lexicographic agent-by-agent order.  Refuses instances beyond the cap."""
    n = instance.n_agents
    if n != instance.n_objects:
        return
    if n > caps.perfect_side:
        raise CapExceededError(
            f"{n} agents exceeds the perfect-matching enumeration cap "
            f"({caps.perfect_side})"
        )
    chosen: list[int] = []
    used = [False] * n

    def rec(ai: int) -> Iterator[Matching]:
        if ai == n:
            yield Matching(
                (instance.agents[i], instance.objects[bj])
                for i, bj in enumerate(chosen)
            )
            return
        for bj in instance.adj_indices(ai):
            if not used[bj]:
                used[bj] = True
                chosen.append(bj)
                yield from rec(ai + 1)
                chosen.pop()
                used[bj] = False

    yield from rec(0)


def enumerate_matchings(
    instance: Instance, caps: EnumerationCaps = DEFAULT_CAPS
) -> Iterator[Matching]:
    """Yield every matching of the instance, including partial ones and the
    empty one.  Refuses instances beyond the (stricter) all-matchings cap."""
    side = max(instance.n_agents, instance.n_objects)
    if side > caps.all_matchings_side:
        raise CapExceededError(
            f"{side} nodes per side exceeds the all-matchings enumeration cap "
            f"({caps.all_matchings_side})"
        )
    n = instance.n_agents
    chosen: list[tuple[int, int]] = []
    used = [False] * instance.n_objects

    def rec(ai: int) -> Iterator[Matching]:
        if ai == n:
            yield Matching(
                (instance.agents[i], instance.objects[bj]) for i, bj in chosen
            )
            return
        yield from rec(ai + 1)  # leave agent ai unmatched
        for bj in instance.adj_indices(ai):
            if not used[bj]:
                used[bj] = True
                chosen.append((ai, bj))
                yield from rec(ai + 1)
                chosen.pop()
                used[bj] = False

    yield from rec(0)


def brute_force_margin(
    instance: Instance, matching: Matching, caps: EnumerationCaps = DEFAULT_CAPS
) -> MarginReport:
    """The unpopularity margin by exhaustive enumeration of all rival
    assignments.  The first rival attaining the maximum (in enumeration
    order) is returned as witness."""
    check_assignment(instance, matching)
    best: MarginReport | None = None
    for rival in enumerate_perfect_matchings(instance, caps):
        value = delta(instance, rival, matching)
        if best is None or value > best.margin:
            best = MarginReport(value, rival)
    if best is None:
        raise NoPerfectMatchingError("instance admits no perfect matching")
    return best


def is_popular_with_penalty(
    instance: Instance,
    matching: Matching,
    kappa: int,
    caps: EnumerationCaps = DEFAULT_CAPS,
) -> bool:
    """Does ``matching`` beat or tie every rival *matching* (not just every
    assignment) under penalty-``kappa`` voting?  Exhaustive; small instances
    only."""
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    check_matching(instance, matching)
    for rival in enumerate_matchings(instance, caps):
        tally = sum(
            vote_with_penalty(instance, a, rival, matching, kappa)
            for a in instance.agents
        )
        if tally > 0:
            return False
    return True


def verify_certificate(
    instance: Instance,
    matching: Matching,
    certificate: DualCertificate,
    k: int = 0,
) -> tuple[bool, tuple[str, ...]]:
    """Check a dual certificate directly against its defining constraints.

    For ``k = 0`` this certifies popularity of the assignment; for ``k > 0``
    it certifies unpopularity margin at most ``k``.  Returns ``(ok,
    failures)`` with one human-readable line per violated constraint:
    completeness and integer ranges of the node values, per-edge feasibility
    against the vote weights, the total bound, and non-negative (zero, when
    ``k = 0``) load on every matched edge.
    """
    failures: list[str] = []
    try:
        check_assignment(instance, matching)
    except MatchingError as exc:
        return False, (f"matching is not an assignment: {exc}",)
    if k < 0:
        return False, ("k must be non-negative",)
    n = instance.n_objects
    agent_hi = n - 1 if k == 0 else n
    for a in instance.agents:
        if a not in certificate.alpha_agents:
            failures.append(f"agent {a!r} has no certificate value")
        else:
            v = certificate.alpha_agents[a]
            if not isinstance(v, int) or not 0 <= v <= agent_hi:
                failures.append(
                    f"agent value alpha[{a!r}] = {v!r} is outside 0..{agent_hi}"
                )
    for b in instance.objects:
        if b not in certificate.alpha_objects:
            failures.append(f"object {b!r} has no certificate value")
        else:
            v = certificate.alpha_objects[b]
            if not isinstance(v, int) or not -(n - 1) <= v <= 0:
                failures.append(
                    f"object value alpha[{b!r}] = {v!r} is outside -{n - 1}..0"
                )
    extra_agents = set(certificate.alpha_agents) - set(instance.agents)
    extra_objects = set(certificate.alpha_objects) - set(instance.objects)
    if extra_agents:
        failures.append(f"certificate names unknown agents: {sorted(extra_agents)}")
    if extra_objects:
        failures.append(f"certificate names unknown objects: {sorted(extra_objects)}")
    if failures:
        return False, tuple(failures)

    for a, b in instance.edges:
        need = edge_weight(instance, matching, (a, b))
        have = certificate.alpha_agents[a] + certificate.alpha_objects[b]
        if have < need:
            failures.append(
                f"edge ({a!r}, {b!r}) is uncovered: alpha sum {have} < weight {need}"
            )
    total = certificate.total()
    if k == 0 and total != 0:
        failures.append(f"certificate total {total} is not 0")
    elif total > k:
        failures.append(f"certificate total {total} exceeds k = {k}")
    for a, b in matching:
        load = certificate.alpha_agents[a] + certificate.alpha_objects[b]
        if load < 0 or (k == 0 and load != 0):
            failures.append(
                f"matched edge ({a!r}, {b!r}) carries invalid load {load}"
            )
    return not failures, tuple(failures)


# -- the weak-rankings characterization ---------------------------------------


@dataclass(frozen=True)
class CharacterizationSets:
    """First-choice edges (undominated in their agent's list) and
    second-choice edges (undominated among the *critical* edges, those whose
    addition grows the maximum matching on first-choice edges)."""

    first_choice: frozenset[tuple[str, str]]
    second_choice: frozenset[tuple[str, str]]


def _max_matching_size(instance: Instance, rows: list[list[int]]) -> int:
    graph = BipartiteGraph(instance.n_agents, instance.n_objects, rows)
    match_l, _ = maximum_matching(graph)
    return sum(1 for j in match_l if j >= 0)


def characterize_weak_rankings(instance: Instance) -> CharacterizationSets:
    """Compute the first/second-choice edge sets of the classical popular-
    matching characterization.

    The sets are well defined for any partial order (dominance just means
    "same agent, strictly better object"), but they characterize popularity
    only under weak rankings -- see :func:`is_popular_weak`.
    """
    first_rows: list[list[int]] = []
    first: set[tuple[str, str]] = set()
    for ai in range(instance.n_agents):
        nbr = instance.neighbor_mask(ai)
        row = [
            bj
            for bj in instance.adj_indices(ai)
            if instance.better_mask(ai, bj) & nbr == 0
        ]
        first_rows.append(row)
        first.update((instance.agents[ai], instance.objects[bj]) for bj in row)
    nu1 = _max_matching_size(instance, first_rows)

    critical: dict[int, set[int]] = {}
    for ai in range(instance.n_agents):
        first_set = set(first_rows[ai])
        for bj in instance.adj_indices(ai):
            if bj in first_set:
                continue
            rows = [list(r) for r in first_rows]
            rows[ai].append(bj)
            if _max_matching_size(instance, rows) > nu1:
                critical.setdefault(ai, set()).add(bj)

    second: set[tuple[str, str]] = set()
    for ai, objs in critical.items():
        mask = 0
        for bj in objs:
            mask |= 1 << bj
        for bj in objs:
            if instance.better_mask(ai, bj) & mask == 0:
                second.add((instance.agents[ai], instance.objects[bj]))
    return CharacterizationSets(frozenset(first), frozenset(second))


def satisfies_weak_characterization(instance: Instance, matching: Matching) -> bool:
    """The two structural conditions of the characterization: every agent is
    matched along a first- or second-choice edge, and the matching's
    first-choice part is a maximum matching of the first-choice subgraph.

    Evaluable on any partial order; equivalent to popularity only under weak
    rankings.
    """
    check_matching(instance, matching)
    sets = characterize_weak_rankings(instance)
    allowed = sets.first_choice | sets.second_choice
    for a in instance.agents:
        b = matching.object_for(a)
        if b is None or (a, b) not in allowed:
            return False
    first_rows = [
        [
            bj
            for bj in instance.adj_indices(ai)
            if (instance.agents[ai], instance.objects[bj]) in sets.first_choice
        ]
        for ai in range(instance.n_agents)
    ]
    nu1 = _max_matching_size(instance, first_rows)
    in_first = sum(1 for a, b in matching if (a, b) in sets.first_choice)
    return in_first == nu1


def is_popular_weak(instance: Instance, matching: Matching) -> bool:
    """Decide popularity of a matching that matches every agent, using the
    first/second-choice characterization.  Requires weak rankings; raises on
    instances with non-transitive indifference, where the characterization
    breaks down."""
    if not instance.has_weak_rankings():
        raise InstanceError(
            "the first/second-choice characterization requires weak rankings"
        )
    return satisfies_weak_characterization(instance, matching)
