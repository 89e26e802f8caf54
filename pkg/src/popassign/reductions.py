"""Instance transformations.

Each ``reduce_*`` / ``*_to_*`` function builds a new instance plus a
:class:`ReductionMap` that can lift solutions back to the source problem.
Node names introduced here live in a reserved ``__``-prefixed namespace and
every transformation raises if a generated name collides with an existing
identifier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .instance import (
    Instance,
    InstanceError,
    Matching,
    MatchingError,
    check_assignment,
    check_matching,
)
from .popular import SolveOutcome, solve_truncated


@dataclass(frozen=True)
class ReductionMap:
    """Connects a source problem to its reduced instance.

    ``lift_back`` maps a matching of the target to a matching of the source;
    for the housing kind use :func:`assignment_to_allocation` instead.
    ``data`` holds kind-specific naming tables.
    """

    kind: str
    source: Instance | None
    target: Instance
    added_agents: tuple[str, ...]
    added_objects: tuple[str, ...]
    data: Mapping[str, Any]

    def lift_back(self, matching: Matching) -> Matching:
        if self.kind == "housing":
            raise InstanceError(
                "housing solutions are allocations; use assignment_to_allocation"
            )
        check_matching(self.target, matching)
        if self.kind == "weak-to-strict":
            return _lift_weak_to_strict(self, matching)
        assert self.source is not None
        agents = set(self.source.agents)
        objects = set(self.source.objects)
        return Matching(
            (a, b) for a, b in matching if a in agents and b in objects
        )


def _claim_agents(instance: Instance, names: Iterable[str]) -> None:
    for name in names:
        if instance.has_agent(name):
            raise InstanceError(
                f"agent identifier {name!r} collides with reduction naming"
            )


def _claim_objects(instance: Instance, names: Iterable[str]) -> None:
    for name in names:
        if instance.has_object(name):
            raise InstanceError(
                f"object identifier {name!r} collides with reduction naming"
            )


def _worst_choice_pairs(
    instance: Instance, agent: str, worst: Sequence[str]
) -> list[tuple[str, str]]:
    """Pairs placing every name in ``worst`` strictly below all of
    ``agent``'s real neighbors (the new names stay mutually tied)."""
    return [(b, w) for b in instance.neighbors(agent) for w in worst]


# -- popular matchings via last resorts and dummies ---------------------------


def add_last_resorts(instance: Instance) -> tuple[Instance, ReductionMap]:
    """Give every agent a personal worst-choice object.

    Matchings of the source correspond to matchings of the target in which
    every agent is matched (unmatched agents take their last resort).  No
    dummy agents are added, so the target usually has more objects than
    agents.
    """
    last_resort = {a: f"__lr:{a}" for a in instance.agents}
    _claim_objects(instance, last_resort.values())
    objects = tuple(instance.objects) + tuple(last_resort[a] for a in instance.agents)
    edges = list(instance.edges)
    edges.extend((a, last_resort[a]) for a in instance.agents)
    preferences: dict[str, list[tuple[str, str]]] = {}
    for a in instance.agents:
        pairs = list(instance.preference_pairs(a))
        pairs.extend(_worst_choice_pairs(instance, a, [last_resort[a]]))
        if pairs:
            preferences[a] = pairs
    target = Instance(instance.agents, objects, edges, preferences)
    rmap = ReductionMap(
        "last-resorts",
        instance,
        target,
        (),
        tuple(last_resort[a] for a in instance.agents),
        {"last_resort": last_resort},
    )
    return target, rmap


def reduce_popular_matching(instance: Instance) -> tuple[Instance, ReductionMap]:
    """Embed the popular-matching problem into the popular-assignment one.

    Every agent gets a personal worst-choice last resort, and one indifferent
    dummy agent per original object is added, adjacent to everything.  A
    matching of the source is popular iff its canonical completion (see
    :func:`extend_to_assignment`) is a popular assignment of the target, and
    popular assignments of the target lift back to popular matchings.
    """
    last_resort = {a: f"__lr:{a}" for a in instance.agents}
    _claim_objects(instance, last_resort.values())
    dummies = tuple(f"__dummy:{i}" for i in range(instance.n_objects))
    _claim_agents(instance, dummies)
    objects = tuple(instance.objects) + tuple(last_resort[a] for a in instance.agents)
    agents = tuple(instance.agents) + dummies
    edges = list(instance.edges)
    edges.extend((a, last_resort[a]) for a in instance.agents)
    edges.extend((d, b) for d in dummies for b in objects)
    preferences: dict[str, list[tuple[str, str]]] = {}
    for a in instance.agents:
        pairs = list(instance.preference_pairs(a))
        pairs.extend(_worst_choice_pairs(instance, a, [last_resort[a]]))
        if pairs:
            preferences[a] = pairs
    target = Instance(agents, objects, edges, preferences)
    rmap = ReductionMap(
        "popular-matching",
        instance,
        target,
        dummies,
        tuple(last_resort[a] for a in instance.agents),
        {"last_resort": last_resort},
    )
    return target, rmap


# -- penalty votes -------------------------------------------------------------


def reduce_penalty_matching(
    instance: Instance, kappa: int
) -> tuple[Instance, ReductionMap]:
    """Gadget for matchings popular with penalty ``kappa``.

    Each agent ``a`` grows a path of ``kappa - 1`` helper agents threaded
    through ``kappa`` personal objects (the first being ``a``'s worst
    choice); one indifferent dummy agent per original object is adjacent to
    all original objects and to every path's last object.  Vote tallies with
    penalty ``kappa`` between source matchings equal plain head-to-head
    tallies between their canonical completions.
    """
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    paths: dict[str, dict[str, tuple[str, ...]]] = {}
    for a in instance.agents:
        paths[a] = {
            "agents": tuple(f"__p:{a}:{i}" for i in range(1, kappa)),
            "objects": tuple(f"__l:{a}:{i}" for i in range(1, kappa + 1)),
        }
        _claim_agents(instance, paths[a]["agents"])
        _claim_objects(instance, paths[a]["objects"])
    dummies = tuple(f"__dummy:{i}" for i in range(instance.n_objects))
    _claim_agents(instance, dummies)

    agents = list(instance.agents)
    objects = list(instance.objects)
    edges = list(instance.edges)
    preferences: dict[str, list[tuple[str, str]]] = {}
    for a in instance.agents:
        p_agents = paths[a]["agents"]
        l_objects = paths[a]["objects"]
        agents.extend(p_agents)
        objects.extend(l_objects)
        edges.append((a, l_objects[0]))
        for i, p in enumerate(p_agents):
            edges.append((p, l_objects[i]))
            edges.append((p, l_objects[i + 1]))
            preferences[p] = [(l_objects[i], l_objects[i + 1])]
        pairs = list(instance.preference_pairs(a))
        pairs.extend(_worst_choice_pairs(instance, a, [l_objects[0]]))
        if pairs:
            preferences[a] = pairs
    agents.extend(dummies)
    tail_objects = [paths[a]["objects"][-1] for a in instance.agents]
    edges.extend(
        (d, b) for d in dummies for b in list(instance.objects) + tail_objects
    )
    target = Instance(agents, objects, edges, preferences)
    added_agents = tuple(
        p for a in instance.agents for p in paths[a]["agents"]
    ) + dummies
    added_objects = tuple(l for a in instance.agents for l in paths[a]["objects"])
    rmap = ReductionMap(
        "penalty-matching",
        instance,
        target,
        added_agents,
        added_objects,
        {"paths": paths, "kappa": kappa},
    )
    return target, rmap


@dataclass(frozen=True)
class PenaltyMatchingResult:
    """Outcome of :func:`solve_penalty_matching`: the lifted matching (when
    found), the raw solver outcome on the reduced instance, and the map."""

    found: bool
    matching: Matching | None
    outcome: SolveOutcome
    reduction: ReductionMap


def solve_penalty_matching(instance: Instance, kappa: int) -> PenaltyMatchingResult:
    """Find a matching of ``instance`` that is popular with penalty ``kappa``
    (with ``kappa = 1``, a plain popular matching), or report none exists.

    Applies :func:`reduce_penalty_matching`, runs the level loop truncated at
    ``kappa + 1`` on the target -- certificates never need to go deeper --
    and lifts the assignment back by dropping the gadget nodes.
    """
    target, rmap = reduce_penalty_matching(instance, kappa)
    outcome = solve_truncated(target, kappa + 1)
    matching = rmap.lift_back(outcome.assignment) if outcome.found else None
    return PenaltyMatchingResult(outcome.found, matching, outcome, rmap)


# -- canonical completions -----------------------------------------------------


def extend_to_assignment(rmap: ReductionMap, matching: Matching) -> Matching:
    """The canonical completion of a source matching inside the reduced
    instance: unmatched agents take their personal padding objects, helper
    agents line up along their paths, and dummy agents sweep up whatever
    objects remain (they are indifferent, so lowest-index leftovers are fine).
    """
    if rmap.source is None:
        raise InstanceError(f"reduction kind {rmap.kind!r} has no source instance")
    check_matching(rmap.source, matching)
    source, target = rmap.source, rmap.target
    pairs: list[tuple[str, str]] = []
    if rmap.kind in ("popular-matching", "last-resorts"):
        last_resort = rmap.data["last_resort"]
        for a in source.agents:
            pairs.append((a, matching.object_for(a) or last_resort[a]))
    elif rmap.kind == "penalty-matching":
        paths = rmap.data["paths"]
        for a in source.agents:
            b = matching.object_for(a)
            p_agents = paths[a]["agents"]
            l_objects = paths[a]["objects"]
            if b is not None:
                pairs.append((a, b))
                pairs.extend(zip(p_agents, l_objects[:-1]))
            else:
                pairs.append((a, l_objects[0]))
                pairs.extend(zip(p_agents, l_objects[1:]))
    else:
        raise InstanceError(f"no canonical completion for reduction kind {rmap.kind!r}")
    if rmap.kind == "last-resorts":
        return Matching(pairs)
    used = {b for _, b in pairs}
    leftovers = [b for b in target.objects if b not in used]
    dummies = [d for d in rmap.added_agents if d.startswith("__dummy:")]
    pairs.extend(zip(dummies, leftovers))
    return Matching(pairs)


# -- diversity quotas ----------------------------------------------------------


def reduce_diversity(
    instance: Instance,
    colors: Mapping[str, int],
    bounds: Sequence[tuple[int, int]],
) -> tuple[Instance, ReductionMap]:
    """Quota-constrained popular matchings: with agents partitioned into
    colors, between ``s_i`` and ``t_i`` agents of color ``i`` must receive a
    real object.

    Color ``i`` gets ``n_i - s_i`` artificial tied-worst objects only its own
    agents accept (capping real winners from below), and ``|B| - sum(s_i)``
    indifferent dummy agents are adjacent to all real objects plus, per
    color, the first ``t_i - s_i`` artificials (leaving ``n_i - t_i``
    artificials that only color-``i`` agents can take, capping real winners
    from above).
    """
    count = [0] * len(bounds)
    for a in instance.agents:
        if a not in colors:
            raise InstanceError(f"agent {a!r} has no color")
        c = colors[a]
        if not isinstance(c, int) or not 0 <= c < len(bounds):
            raise InstanceError(f"color {c!r} of agent {a!r} is out of range")
        count[c] += 1
    for a in colors:
        if not instance.has_agent(a):
            raise InstanceError(f"colors reference unknown agent {a!r}")
    lower_total = 0
    for i, (s, t) in enumerate(bounds):
        if not 0 <= s <= t <= count[i]:
            raise InstanceError(
                f"bounds ({s}, {t}) for color {i} violate 0 <= s <= t <= {count[i]}"
            )
        lower_total += s
    if lower_total > instance.n_objects:
        raise InstanceError(
            f"total lower quota {lower_total} exceeds the object count "
            f"{instance.n_objects}"
        )

    artificials = tuple(
        tuple(f"__art:{i}:{j}" for j in range(count[i] - bounds[i][0]))
        for i in range(len(bounds))
    )
    for group in artificials:
        _claim_objects(instance, group)
    dummies = tuple(f"__dummy:{i}" for i in range(instance.n_objects - lower_total))
    _claim_agents(instance, dummies)
    designated = tuple(
        artificials[i][: bounds[i][1] - bounds[i][0]] for i in range(len(bounds))
    )

    agents = tuple(instance.agents) + dummies
    objects = tuple(instance.objects) + tuple(x for group in artificials for x in group)
    edges = list(instance.edges)
    preferences: dict[str, list[tuple[str, str]]] = {}
    for a in instance.agents:
        group = artificials[colors[a]]
        edges.extend((a, x) for x in group)
        pairs = list(instance.preference_pairs(a))
        pairs.extend(_worst_choice_pairs(instance, a, group))
        if pairs:
            preferences[a] = pairs
    dummy_objects = list(instance.objects) + [x for group in designated for x in group]
    edges.extend((d, b) for d in dummies for b in dummy_objects)
    target = Instance(agents, objects, edges, preferences)
    rmap = ReductionMap(
        "diversity",
        instance,
        target,
        dummies,
        tuple(x for group in artificials for x in group),
        {
            "colors": dict(colors),
            "bounds": tuple(tuple(b) for b in bounds),
            "artificials": artificials,
            "designated": designated,
        },
    )
    return target, rmap


# -- housing markets -----------------------------------------------------------


@dataclass(frozen=True)
class HousingMarket:
    """Agents owning one house each, directed trade arcs, and per-agent
    partial orders over their own outgoing arcs."""

    agents: tuple[str, ...]
    arcs: tuple[tuple[str, str], ...]
    preferences: Mapping[str, tuple[tuple[tuple[str, str], tuple[str, str]], ...]]


def market_from_document(doc: Any) -> HousingMarket:
    if not isinstance(doc, dict):
        raise InstanceError("market document must be a JSON object")
    for key in ("agents", "arcs"):
        if key not in doc or not isinstance(doc[key], list):
            raise InstanceError(f"market document needs a {key!r} list")
    unknown = set(doc) - {"agents", "arcs", "preferences"}
    if unknown:
        raise InstanceError(f"unknown top-level keys: {sorted(unknown)}")
    agents = tuple(doc["agents"])
    seen: set[str] = set()
    for a in agents:
        if not isinstance(a, str) or not a:
            raise InstanceError(f"agent identifier {a!r} must be a non-empty string")
        if a in seen:
            raise InstanceError(f"duplicate agent identifier {a!r}")
        seen.add(a)
    arcs: list[tuple[str, str]] = []
    arc_set: set[tuple[str, str]] = set()
    for arc in doc["arcs"]:
        if not isinstance(arc, list) or len(arc) != 2:
            raise InstanceError(f"arc {arc!r} must be a two-element list")
        x, y = arc
        if x not in seen or y not in seen:
            raise InstanceError(f"arc {arc!r} references an unknown agent")
        if x == y:
            raise InstanceError(f"self-arc {arc!r} is not allowed")
        if (x, y) in arc_set:
            raise InstanceError(f"duplicate arc {arc!r}")
        arc_set.add((x, y))
        arcs.append((x, y))
    preferences: dict[str, tuple] = {}
    raw_prefs = doc.get("preferences", {})
    if not isinstance(raw_prefs, dict):
        raise InstanceError("'preferences' must be an object keyed by agent")
    for agent, spec in raw_prefs.items():
        if agent not in seen:
            raise InstanceError(f"preferences reference unknown agent {agent!r}")
        if not isinstance(spec, dict) or list(spec) != ["pairs"]:
            raise InstanceError(
                f"market preferences for agent {agent!r} must be {{'pairs': [...]}}"
            )
        pairs = []
        succ: dict[tuple[str, str], set[tuple[str, str]]] = {}
        for p in spec["pairs"]:
            if (
                not isinstance(p, list)
                or len(p) != 2
                or any(not isinstance(x, list) or len(x) != 2 for x in p)
            ):
                raise InstanceError(
                    f"market preference pair {p!r} for agent {agent!r} must be a "
                    "pair of arcs"
                )
            hi = (p[0][0], p[0][1])
            lo = (p[1][0], p[1][1])
            for arc in (hi, lo):
                if arc not in arc_set:
                    raise InstanceError(
                        f"preference of agent {agent!r} references missing arc {list(arc)!r}"
                    )
                if arc[0] != agent:
                    raise InstanceError(
                        f"preference of agent {agent!r} ranks arc {list(arc)!r} "
                        "that does not start at the agent"
                    )
            if hi == lo:
                raise InstanceError(
                    f"agent {agent!r} declares arc {list(hi)!r} better than itself"
                )
            pairs.append((hi, lo))
            succ.setdefault(hi, set()).add(lo)
        if _arc_cycle(succ):
            raise InstanceError(f"cyclic arc preferences for agent {agent!r}")
        preferences[agent] = tuple(pairs)
    return HousingMarket(agents, tuple(arcs), preferences)


def _arc_cycle(succ: Mapping[tuple[str, str], set[tuple[str, str]]]) -> bool:
    color: dict[tuple[str, str], int] = {}

    def visit(node: tuple[str, str]) -> bool:
        color[node] = 1
        for nxt in succ.get(node, ()):
            c = color.get(nxt, 0)
            if c == 1 or (c == 0 and visit(nxt)):
                return True
        color[node] = 2
        return False

    return any(color.get(n, 0) == 0 and visit(n) for n in sorted(succ))


def parse_market(source: str) -> HousingMarket:
    """Parse a JSON housing-market document (see README for the schema)."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from exc
    return market_from_document(doc)


@dataclass(frozen=True)
class Allocation:
    """A set of trade arcs forming agent-disjoint cycles."""

    arcs: tuple[tuple[str, str], ...]

    def cycles(self) -> tuple[tuple[str, ...], ...]:
        """Cycle decomposition; each cycle starts at its smallest agent and
        cycles are sorted by that agent."""
        succ = dict(self.arcs)
        seen: set[str] = set()
        out = []
        for start in sorted(succ):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            cur = succ[start]
            while cur != start:
                cycle.append(cur)
                seen.add(cur)
                cur = succ[cur]
            out.append(tuple(cycle))
        return tuple(out)

    @property
    def trading_agents(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.arcs)


def _check_allocation_arcs(arcs: Sequence[tuple[str, str]]) -> None:
    succ: dict[str, str] = {}
    for x, y in arcs:
        if x in succ:
            raise MatchingError(f"agent {x!r} trades along two arcs")
        succ[x] = y
    targets = list(succ.values())
    if len(set(targets)) != len(targets):
        raise MatchingError("two trade arcs point at the same agent")
    if set(targets) != set(succ):
        raise MatchingError("trade arcs do not decompose into closed cycles")


def housing_to_assignment(market: HousingMarket) -> tuple[Instance, ReductionMap]:
    """Model a housing market as an assignment instance: one object per
    house, an edge from each agent to her own house (her unique worst choice)
    and to the house at the end of each outgoing arc, with arc preferences
    carried over.  Allocations correspond to assignments -- agents keeping
    their own house are exactly those not trading -- and popular allocations
    to popular assignments.
    """
    house = {a: f"__house:{a}" for a in market.agents}
    owner = {h: a for a, h in house.items()}
    outgoing: dict[str, list[str]] = {a: [] for a in market.agents}
    for x, y in market.arcs:
        outgoing[x].append(y)
    edges: list[tuple[str, str]] = []
    preferences: dict[str, list[tuple[str, str]]] = {}
    for a in market.agents:
        edges.append((a, house[a]))
        edges.extend((a, house[y]) for y in outgoing[a])
        pairs = [
            (house[hi[1]], house[lo[1]])
            for hi, lo in market.preferences.get(a, ())
        ]
        pairs.extend((house[y], house[a]) for y in outgoing[a])
        if pairs:
            preferences[a] = pairs
    target = Instance(
        market.agents, tuple(house[a] for a in market.agents), edges, preferences
    )
    rmap = ReductionMap(
        "housing",
        None,
        target,
        (),
        tuple(house[a] for a in market.agents),
        {"market": market, "house_of": house, "owner_of": owner},
    )
    return target, rmap


def assignment_to_allocation(rmap: ReductionMap, matching: Matching) -> Allocation:
    """Read the trading cycles off an assignment of the housing instance,
    validating that they are agent-disjoint closed cycles."""
    if rmap.kind != "housing":
        raise InstanceError("assignment_to_allocation needs a housing reduction map")
    check_assignment(rmap.target, matching)
    owner = rmap.data["owner_of"]
    arcs = []
    for a in rmap.data["market"].agents:
        target_owner = owner[matching.object_for(a)]
        if target_owner != a:
            arcs.append((a, target_owner))
    _check_allocation_arcs(arcs)
    return Allocation(tuple(sorted(arcs)))


def allocation_to_assignment(rmap: ReductionMap, allocation: Allocation) -> Matching:
    """The assignment corresponding to an allocation: trading agents take the
    house their arc points at, everyone else keeps their own."""
    if rmap.kind != "housing":
        raise InstanceError("allocation_to_assignment needs a housing reduction map")
    market: HousingMarket = rmap.data["market"]
    arc_set = set(market.arcs)
    for arc in allocation.arcs:
        if arc not in arc_set:
            raise MatchingError(f"allocation arc {arc!r} is not a market arc")
    _check_allocation_arcs(allocation.arcs)
    house = rmap.data["house_of"]
    succ = dict(allocation.arcs)
    return Matching((a, house[succ.get(a, a)]) for a in market.agents)


# -- de-indifferencing ---------------------------------------------------------


def weak_to_strict(instance: Instance) -> tuple[Instance, int, ReductionMap]:
    """Rewrite an instance with weak rankings into one with strict
    preferences, preserving bounded-margin solvability with a fixed offset.

    Two stages.  First every agent moves her tiers onto one indifferent
    helper agent per tier (her own edges now go to per-tier proxy objects,
    ranked strictly); then every helper's ties are split by a pair of strict
    clones sharing two private objects.  Returns ``(target, q, map)`` where
    ``q`` is the number of helper agents -- one per (agent, tier) pair: the
    source admits an assignment with unpopularity margin at most ``k`` iff
    the target admits one with margin at most ``k + q``.
    """
    if not instance.has_weak_rankings():
        raise InstanceError("weak_to_strict requires weak rankings (ordered tiers)")

    transformed: dict[str, dict[str, tuple]] = {}
    stage_agents: list[str] = []
    tier_agents_all: list[str] = []
    stage_objects = list(instance.objects)
    stage_edges: list[tuple[str, str]] = []
    stage_adj: dict[str, list[str]] = {}
    stage_prefs: dict[str, list[tuple[str, str]]] = {}
    for v in instance.agents:
        tiers = instance.tiers(v)
        tier_agents = tuple(f"__tier:{v}:{i + 1}" for i in range(len(tiers)))
        tier_objects = tuple(f"__tierobj:{v}:{i + 1}" for i in range(len(tiers)))
        _claim_agents(instance, tier_agents)
        _claim_objects(instance, tier_objects)
        stage_agents.append(v)
        stage_agents.extend(tier_agents)
        tier_agents_all.extend(tier_agents)
        stage_objects.extend(tier_objects)
        stage_edges.extend((v, b) for b in tier_objects)
        if len(tiers) > 1:
            stage_prefs[v] = [
                (tier_objects[i], tier_objects[i + 1]) for i in range(len(tiers) - 1)
            ]
        for i, tier in enumerate(tiers):
            nbrs = list(tier) + [tier_objects[i]]
            stage_edges.extend((tier_agents[i], b) for b in nbrs)
            stage_adj[tier_agents[i]] = nbrs
        transformed[v] = {
            "tiers": tiers,
            "tier_agents": tier_agents,
            "tier_objects": tier_objects,
        }

    clones: dict[str, dict[str, tuple[str, ...]]] = {}
    final_agents = list(stage_agents)
    final_objects = list(stage_objects)
    final_edges = list(stage_edges)
    final_prefs = dict(stage_prefs)
    for ta in tier_agents_all:
        clone_agents = (f"__ind:{ta}:1", f"__ind:{ta}:2")
        clone_objects = (f"__indobj:{ta}:1", f"__indobj:{ta}:2")
        _claim_agents(instance, clone_agents)
        _claim_objects(instance, clone_objects)
        final_agents.extend(clone_agents)
        final_objects.extend(clone_objects)
        chain = list(clone_objects) + stage_adj[ta]
        for agent in (ta,) + clone_agents:
            if agent != ta:
                final_edges.extend((agent, b) for b in stage_adj[ta])
            final_edges.extend((agent, b) for b in clone_objects)
            final_prefs[agent] = [
                (chain[i], chain[i + 1]) for i in range(len(chain) - 1)
            ]
        clones[ta] = {"agents": clone_agents, "objects": clone_objects}

    target = Instance(final_agents, final_objects, final_edges, final_prefs)
    q = len(tier_agents_all)
    added_agents = tuple(a for a in final_agents if not instance.has_agent(a))
    added_objects = tuple(b for b in final_objects if not instance.has_object(b))
    rmap = ReductionMap(
        "weak-to-strict",
        instance,
        target,
        added_agents,
        added_objects,
        {"transformed": transformed, "clones": clones},
    )
    return target, q, rmap


def _lift_weak_to_strict(rmap: ReductionMap, matching: Matching) -> Matching:
    check_assignment(rmap.target, matching)
    source = rmap.source
    assert source is not None
    transformed = rmap.data["transformed"]
    clones = rmap.data["clones"]
    pairs: list[tuple[str, str]] = []
    for v in source.agents:
        info = transformed[v]
        held = matching.object_for(v)
        try:
            i = info["tier_objects"].index(held)
        except ValueError:
            raise MatchingError(
                f"agent {v!r} is not matched to one of her tier objects"
            ) from None
        ta = info["tier_agents"][i]
        trio = (ta,) + clones[ta]["agents"]
        partner = None
        for member in trio:
            p = matching.object_for(member)
            if p is not None and source.has_object(p):
                partner = p
        if partner is None:
            raise MatchingError(
                f"no member of the tier-{i + 1} gadget of agent {v!r} holds a "
                "source object"
            )
        pairs.append((v, partner))
    return Matching(pairs)
