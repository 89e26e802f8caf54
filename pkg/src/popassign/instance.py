"""Bipartite assignment instances with one-sided partial-order preferences.

An instance has a set of agents, a set of objects, a set of acceptable
agent-object edges, and, for every agent, a strict partial order over her own
neighbors.  Two neighbors an agent does not order are *incomparable* (the
agent is indifferent between them); indifference is not required to be
transitive.

Preferences are stored transitively closed, as per-agent bitmasks over global
object indices ("which neighbors are strictly worse / strictly better than
this one").  That representation makes the edge tests performed by the
level-based solvers constant-time, which matters for dense instances with a
couple hundred nodes per side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping


class InstanceError(ValueError):
    """Raised for malformed instance documents or construction arguments."""


class MatchingError(ValueError):
    """Raised when a matching is inconsistent with the instance at hand."""


class PrefComparison(Enum):
    """Outcome of comparing two objects from one agent's point of view."""

    PREFERS = "prefers"
    DISPREFERRED = "dispreferred"
    INDIFFERENT = "indifferent"


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _check_name(name: Any, what: str) -> str:
    if not isinstance(name, str) or not name:
        raise InstanceError(f"{what} identifiers must be non-empty strings, got {name!r}")
    return name


class Instance:
    """An immutable two-sided instance.

    Parameters
    ----------
    agents, objects:
        Identifier sequences; duplicates are rejected.  The two sides are
        independent namespaces.
    edges:
        Acceptable ``(agent, object)`` pairs; duplicates are rejected.
    preferences:
        Optional mapping from agent id to an iterable of ``(better, worse)``
        object pairs.  Pairs may only compare objects adjacent to that agent,
        and their transitive closure must be irreflexive (no preference
        cycles).  Agents absent from the mapping are indifferent among all
        their neighbors.
    """

    __slots__ = (
        "_agents",
        "_objects",
        "_agent_index",
        "_object_index",
        "_adj",
        "_object_adj",
        "_nbr_mask",
        "_edge_set",
        "_edges",
        "_worse",
        "_better",
    )

    def __init__(
        self,
        agents: Iterable[str],
        objects: Iterable[str],
        edges: Iterable[tuple[str, str]],
        preferences: Mapping[str, Iterable[tuple[str, str]]] | None = None,
    ) -> None:
        self._agents = tuple(_check_name(a, "agent") for a in agents)
        self._objects = tuple(_check_name(b, "object") for b in objects)
        self._agent_index = {a: i for i, a in enumerate(self._agents)}
        self._object_index = {b: j for j, b in enumerate(self._objects)}
        if len(self._agent_index) != len(self._agents):
            raise InstanceError("duplicate agent identifier")
        if len(self._object_index) != len(self._objects):
            raise InstanceError("duplicate object identifier")

        adj_sets: list[set[int]] = [set() for _ in self._agents]
        object_adj_sets: list[set[int]] = [set() for _ in self._objects]
        for edge in edges:
            try:
                a, b = edge
            except (TypeError, ValueError):
                raise InstanceError(f"edge {edge!r} is not an (agent, object) pair") from None
            ai = self._agent_index.get(a)
            bj = self._object_index.get(b)
            if ai is None:
                raise InstanceError(f"edge {edge!r} references unknown agent {a!r}")
            if bj is None:
                raise InstanceError(f"edge {edge!r} references unknown object {b!r}")
            if bj in adj_sets[ai]:
                raise InstanceError(f"duplicate edge ({a!r}, {b!r})")
            adj_sets[ai].add(bj)
            object_adj_sets[bj].add(ai)
        self._adj = tuple(tuple(sorted(s)) for s in adj_sets)
        self._object_adj = tuple(tuple(sorted(s)) for s in object_adj_sets)
        self._nbr_mask = tuple(sum(1 << j for j in s) for s in self._adj)
        self._edges = tuple(
            (ai, bj) for ai in range(len(self._agents)) for bj in self._adj[ai]
        )
        self._edge_set = frozenset(self._edges)

        worse_by_agent: list[dict[int, int]] = []
        better_by_agent: list[dict[int, int]] = []
        preferences = preferences or {}
        succ_by_agent: dict[int, dict[int, set[int]]] = {}
        for agent_name, pairs in preferences.items():
            ai = self._agent_index.get(agent_name)
            if ai is None:
                raise InstanceError(f"preferences reference unknown agent {agent_name!r}")
            succ: dict[int, set[int]] = {}
            for pair in pairs:
                try:
                    b, b2 = pair
                except (TypeError, ValueError):
                    raise InstanceError(
                        f"preference pair {pair!r} for agent {agent_name!r} is not a pair"
                    ) from None
                bj = self._object_index.get(b)
                cj = self._object_index.get(b2)
                if bj is None or cj is None:
                    raise InstanceError(
                        f"preference pair ({b!r}, {b2!r}) for agent {agent_name!r} "
                        "references an unknown object"
                    )
                if bj not in adj_sets[ai] or cj not in adj_sets[ai]:
                    raise InstanceError(
                        f"preference pair ({b!r}, {b2!r}) for agent {agent_name!r} "
                        "compares objects that are not both adjacent to the agent"
                    )
                if bj == cj:
                    raise InstanceError(
                        f"agent {agent_name!r} declares {b!r} better than itself"
                    )
                succ.setdefault(bj, set()).add(cj)
            succ_by_agent[ai] = succ

        for ai, agent_name in enumerate(self._agents):
            succ = succ_by_agent.get(ai, {})
            worse_by_agent.append(self._close(agent_name, succ))
            better: dict[int, int] = {}
            for b, mask in worse_by_agent[ai].items():
                bit = 1 << b
                for c in iter_bits(mask):
                    better[c] = better.get(c, 0) | bit
            better_by_agent.append(better)
        self._worse = tuple(worse_by_agent)
        self._better = tuple(better_by_agent)

    @staticmethod
    def _close(agent_name: str, succ: Mapping[int, set[int]]) -> dict[int, int]:
        # Transitive closure of the raw "strictly better than" pairs, by
        # depth-first search in postorder; a back edge is a preference cycle.
        worse: dict[int, int] = {}
        color: dict[int, int] = {}  # 1 = on stack, 2 = finished
        for root in sorted(succ):
            if color.get(root) == 2:
                continue
            stack = [(root, iter(sorted(succ.get(root, ()))))]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    c = color.get(nxt, 0)
                    if c == 1:
                        raise InstanceError(
                            f"cyclic preferences for agent {agent_name!r}"
                        )
                    if c == 0:
                        color[nxt] = 1
                        stack.append((nxt, iter(sorted(succ.get(nxt, ())))))
                        advanced = True
                        break
                if not advanced:
                    stack.pop()
                    color[node] = 2
                    mask = 0
                    for s in succ.get(node, ()):
                        mask |= (1 << s) | worse.get(s, 0)
                    if mask:
                        worse[node] = mask
        return worse

    # -- basic shape -------------------------------------------------------

    @property
    def agents(self) -> tuple[str, ...]:
        return self._agents

    @property
    def objects(self) -> tuple[str, ...]:
        return self._objects

    @property
    def n_agents(self) -> int:
        return len(self._agents)

    @property
    def n_objects(self) -> int:
        return len(self._objects)

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        """All edges as name pairs, sorted by (agent index, object index)."""
        return tuple((self._agents[a], self._objects[b]) for a, b in self._edges)

    @property
    def edge_indices(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    def agent_index(self, agent: str) -> int:
        try:
            return self._agent_index[agent]
        except KeyError:
            raise InstanceError(f"unknown agent {agent!r}") from None

    def object_index(self, obj: str) -> int:
        try:
            return self._object_index[obj]
        except KeyError:
            raise InstanceError(f"unknown object {obj!r}") from None

    def has_agent(self, agent: str) -> bool:
        return agent in self._agent_index

    def has_object(self, obj: str) -> bool:
        return obj in self._object_index

    def has_edge(self, agent: str, obj: str) -> bool:
        ai = self._agent_index.get(agent)
        bj = self._object_index.get(obj)
        return ai is not None and bj is not None and (ai, bj) in self._edge_set

    def neighbors(self, agent: str) -> tuple[str, ...]:
        """Objects adjacent to ``agent``, in object-index order."""
        return tuple(self._objects[j] for j in self._adj[self.agent_index(agent)])

    def neighbors_of_object(self, obj: str) -> tuple[str, ...]:
        return tuple(self._agents[i] for i in self._object_adj[self.object_index(obj)])

    # -- index-level accessors used by the solvers --------------------------

    def adj_indices(self, ai: int) -> tuple[int, ...]:
        return self._adj[ai]

    def object_adj_indices(self, bj: int) -> tuple[int, ...]:
        return self._object_adj[bj]

    def neighbor_mask(self, ai: int) -> int:
        return self._nbr_mask[ai]

    def worse_mask(self, ai: int, bj: int) -> int:
        """Bitmask of objects strictly worse than ``bj`` for agent ``ai``."""
        return self._worse[ai].get(bj, 0)

    def better_mask(self, ai: int, bj: int) -> int:
        """Bitmask of objects strictly better than ``bj`` for agent ``ai``."""
        return self._better[ai].get(bj, 0)

    # -- preference queries --------------------------------------------------

    def prefers(self, agent: str, obj: str, other: str) -> bool:
        """True iff ``agent`` strictly prefers ``obj`` to ``other``.

        Both objects must be adjacent to the agent.
        """
        ai = self.agent_index(agent)
        bj = self.object_index(obj)
        cj = self.object_index(other)
        for j, name in ((bj, obj), (cj, other)):
            if (ai, j) not in self._edge_set:
                raise InstanceError(f"object {name!r} is not adjacent to agent {agent!r}")
        return bool(self._worse[ai].get(bj, 0) >> cj & 1)

    def preference_pairs(self, agent: str) -> tuple[tuple[str, str], ...]:
        """The transitively closed strict pairs of ``agent``, sorted."""
        ai = self.agent_index(agent)
        out = []
        for b, mask in self._worse[ai].items():
            for c in iter_bits(mask):
                out.append((self._objects[b], self._objects[c]))
        return tuple(sorted(out))

    def is_weak_agent(self, agent: str) -> bool:
        """True iff ``agent``'s indifference is transitive (an ordered-tier
        ranking).  Holds iff every incomparable neighbor pair has identical
        worse-sets and better-sets."""
        ai = self.agent_index(agent)
        nbrs = self._adj[ai]
        worse = self._worse[ai]
        better = self._better[ai]
        for x, b in enumerate(nbrs):
            wb = worse.get(b, 0)
            bb = better.get(b, 0)
            for c in nbrs[x + 1:]:
                if wb >> c & 1 or better.get(b, 0) >> c & 1:
                    continue
                if wb != worse.get(c, 0) or bb != better.get(c, 0):
                    return False
        return True

    def has_weak_rankings(self) -> bool:
        return all(self.is_weak_agent(a) for a in self._agents)

    def tiers(self, agent: str) -> tuple[tuple[str, ...], ...]:
        """The agent's neighbors grouped into indifference tiers, best first.

        Only defined for agents with weak rankings.
        """
        if not self.is_weak_agent(agent):
            raise InstanceError(f"agent {agent!r} does not have a weak ranking")
        ai = self.agent_index(agent)
        groups: dict[tuple[int, int], list[int]] = {}
        for b in self._adj[ai]:
            key = (self._worse[ai].get(b, 0), self._better[ai].get(b, 0))
            groups.setdefault(key, []).append(b)
        ordered = sorted(groups.items(), key=lambda kv: -kv[0][0].bit_count())
        return tuple(tuple(self._objects[b] for b in sorted(g)) for _, g in ordered)

    # -- serialization -------------------------------------------------------

    def to_document(self) -> dict:
        """A JSON-ready document.  Weak rankings are emitted as tiers, other
        partial orders as the closed pair list."""
        prefs: dict[str, dict] = {}
        for a in self._agents:
            ai = self._agent_index[a]
            if not self._worse[ai]:
                continue
            if self.is_weak_agent(a):
                prefs[a] = {"tiers": [list(t) for t in self.tiers(a)]}
            else:
                prefs[a] = {"pairs": [list(p) for p in self.preference_pairs(a)]}
        doc: dict = {
            "agents": list(self._agents),
            "objects": list(self._objects),
            "edges": [[a, b] for a, b in self.edges],
        }
        if prefs:
            doc["preferences"] = prefs
        return doc

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"Instance({self.n_agents} agents, {self.n_objects} objects, "
            f"{len(self._edges)} edges)"
        )


class Matching:
    """A set of agent-object pairs in which no agent and no object repeats.

    Matchings are plain name-level containers; they carry no reference to an
    instance.  Use :func:`check_matching` / :func:`check_assignment` to test a
    matching against an instance.
    """

    __slots__ = ("_pairs", "_by_agent", "_by_object")

    def __init__(self, pairs: Iterable[tuple[str, str]] = ()) -> None:
        by_agent: dict[str, str] = {}
        by_object: dict[str, str] = {}
        for pair in pairs:
            try:
                a, b = pair
            except (TypeError, ValueError):
                raise MatchingError(f"{pair!r} is not an (agent, object) pair") from None
            if not isinstance(a, str) or not isinstance(b, str):
                raise MatchingError(f"matching pair {pair!r} must contain strings")
            if a in by_agent:
                raise MatchingError(f"agent {a!r} is matched more than once")
            if b in by_object:
                raise MatchingError(f"object {b!r} is matched more than once")
            by_agent[a] = b
            by_object[b] = a
        self._by_agent = by_agent
        self._by_object = by_object
        self._pairs = tuple(sorted(by_agent.items()))

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return self._pairs

    def object_for(self, agent: str) -> str | None:
        return self._by_agent.get(agent)

    def agent_for(self, obj: str) -> str | None:
        return self._by_object.get(obj)

    @property
    def matched_agents(self) -> frozenset[str]:
        return frozenset(self._by_agent)

    @property
    def matched_objects(self) -> frozenset[str]:
        return frozenset(self._by_object)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)

    def __contains__(self, pair: object) -> bool:
        return isinstance(pair, tuple) and len(pair) == 2 and \
            self._by_agent.get(pair[0]) == pair[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Matching({list(self._pairs)!r})"


def check_matching(instance: Instance, matching: Matching) -> None:
    """Raise :class:`MatchingError` unless every pair is an instance edge."""
    for a, b in matching:
        if not instance.has_edge(a, b):
            raise MatchingError(f"({a!r}, {b!r}) is not an edge of the instance")


def check_assignment(instance: Instance, matching: Matching) -> None:
    """Raise :class:`MatchingError` unless ``matching`` is a perfect matching
    of ``instance`` (every agent and every object matched along edges)."""
    check_matching(instance, matching)
    if len(matching) != instance.n_agents or len(matching) != instance.n_objects:
        raise MatchingError(
            f"matching of size {len(matching)} is not an assignment of an instance "
            f"with {instance.n_agents} agents and {instance.n_objects} objects"
        )


def compare(instance: Instance, agent: str, obj: str, other: str) -> PrefComparison:
    """Compare two of ``agent``'s neighbors from her point of view."""
    if instance.prefers(agent, obj, other):
        return PrefComparison.PREFERS
    if instance.prefers(agent, other, obj):
        return PrefComparison.DISPREFERRED
    return PrefComparison.INDIFFERENT


# -- documents ---------------------------------------------------------------


def _tier_pairs(agent: str, tiers: list) -> list[tuple[str, str]]:
    """Expand a tier list into strict pairs between consecutive tiers (the
    transitive closure recovers the rest)."""
    seen: set[str] = set()
    for tier in tiers:
        if not isinstance(tier, list) or not tier:
            raise InstanceError(f"tiers for agent {agent!r} must be non-empty lists")
        for b in tier:
            if not isinstance(b, str):
                raise InstanceError(f"tier entry {b!r} for agent {agent!r} is not a string")
            if b in seen:
                raise InstanceError(f"object {b!r} appears twice in tiers of agent {agent!r}")
            seen.add(b)
    pairs = []
    for hi, lo in zip(tiers, tiers[1:]):
        pairs.extend((b, c) for b in hi for c in lo)
    return pairs


def instance_from_document(doc: Any) -> Instance:
    """Build an :class:`Instance` from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    for key in ("agents", "objects", "edges"):
        if key not in doc:
            raise InstanceError(f"instance document is missing {key!r}")
        if not isinstance(doc[key], list):
            raise InstanceError(f"{key!r} must be a list")
    unknown = set(doc) - {"agents", "objects", "edges", "preferences"}
    if unknown:
        raise InstanceError(f"unknown top-level keys: {sorted(unknown)}")
    edges = []
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise InstanceError(f"edge {e!r} must be a two-element list")
        edges.append((e[0], e[1]))
    preferences: dict[str, list[tuple[str, str]]] = {}
    raw_prefs = doc.get("preferences", {})
    if not isinstance(raw_prefs, dict):
        raise InstanceError("'preferences' must be an object keyed by agent")
    for agent, spec in raw_prefs.items():
        if not isinstance(spec, dict) or len(spec) != 1 or \
                next(iter(spec)) not in ("pairs", "tiers"):
            raise InstanceError(
                f"preferences for agent {agent!r} must be exactly one of "
                "{'pairs': [...]} or {'tiers': [...]}"
            )
        kind, body = next(iter(spec.items()))
        if not isinstance(body, list):
            raise InstanceError(f"{kind!r} for agent {agent!r} must be a list")
        if kind == "tiers":
            preferences[agent] = _tier_pairs(agent, body)
        else:
            pairs = []
            for p in body:
                if not isinstance(p, list) or len(p) != 2:
                    raise InstanceError(
                        f"preference pair {p!r} for agent {agent!r} must be a "
                        "two-element list"
                    )
                pairs.append((p[0], p[1]))
            preferences[agent] = pairs
    return Instance(doc["agents"], doc["objects"], edges, preferences)


def parse_instance(source: str) -> Instance:
    """Parse a JSON instance document (see README for the schema)."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from exc
    return instance_from_document(doc)


def serialize_instance(instance: Instance) -> str:
    """Serialize to the JSON document format accepted by :func:`parse_instance`.

    Note that non-weak preferences are materialized as the full closed pair
    list, so this is intended for small and medium instances.
    """
    return json.dumps(instance.to_document(), indent=2)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`: ``ok`` plus all collected problems."""

    ok: bool
    problems: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate(source: str | dict | Instance) -> ValidationReport:
    """Check an instance document, collecting every violation found rather
    than stopping at the first.

    Accepts raw JSON text, a parsed document, or an already-built
    :class:`Instance` (which is valid by construction).
    """
    if isinstance(source, Instance):
        return ValidationReport(True, ())
    problems: list[str] = []
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            return ValidationReport(False, (f"invalid JSON: {exc}",))
    else:
        doc = source
    if not isinstance(doc, dict):
        return ValidationReport(False, ("instance document must be a JSON object",))

    for key in ("agents", "objects", "edges"):
        if key not in doc:
            problems.append(f"missing key {key!r}")
        elif not isinstance(doc[key], list):
            problems.append(f"{key!r} must be a list")
    unknown = set(doc) - {"agents", "objects", "edges", "preferences"}
    if unknown:
        problems.append(f"unknown top-level keys: {sorted(unknown)}")
    if problems:
        return ValidationReport(False, tuple(problems))

    agents = doc["agents"]
    objects = doc["objects"]
    for side, names in (("agent", agents), ("object", objects)):
        seen: set[str] = set()
        for name in names:
            if not isinstance(name, str) or not name:
                problems.append(f"{side} identifier {name!r} is not a non-empty string")
            elif name in seen:
                problems.append(f"duplicate {side} identifier {name!r}")
            else:
                seen.add(name)
    agent_set = {a for a in agents if isinstance(a, str)}
    object_set = {b for b in objects if isinstance(b, str)}

    adjacency: dict[str, set[str]] = {a: set() for a in agent_set}
    seen_edges: set[tuple[str, str]] = set()
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            problems.append(f"edge {e!r} must be a two-element list")
            continue
        a, b = e
        if a not in agent_set:
            problems.append(f"edge {e!r} references unknown agent {a!r}")
        if b not in object_set:
            problems.append(f"edge {e!r} references unknown object {b!r}")
        if a in agent_set and b in object_set:
            if (a, b) in seen_edges:
                problems.append(f"duplicate edge ({a!r}, {b!r})")
            seen_edges.add((a, b))
            adjacency[a].add(b)

    raw_prefs = doc.get("preferences", {})
    if not isinstance(raw_prefs, dict):
        problems.append("'preferences' must be an object keyed by agent")
        raw_prefs = {}
    for agent, spec in raw_prefs.items():
        if agent not in agent_set:
            problems.append(f"preferences reference unknown agent {agent!r}")
            continue
        if not isinstance(spec, dict) or len(spec) != 1 or \
                next(iter(spec)) not in ("pairs", "tiers"):
            problems.append(
                f"preferences for agent {agent!r} must be exactly one of "
                "{'pairs': [...]} or {'tiers': [...]}"
            )
            continue
        kind, body = next(iter(spec.items()))
        if not isinstance(body, list):
            problems.append(f"{kind!r} for agent {agent!r} must be a list")
            continue
        pairs: list[tuple[str, str]] = []
        if kind == "tiers":
            try:
                pairs = _tier_pairs(agent, body)
            except InstanceError as exc:
                problems.append(str(exc))
                continue
        else:
            bad = False
            for p in body:
                if not isinstance(p, list) or len(p) != 2:
                    problems.append(
                        f"preference pair {p!r} for agent {agent!r} must be a "
                        "two-element list"
                    )
                    bad = True
                    continue
                pairs.append((p[0], p[1]))
            if bad:
                continue
        succ: dict[str, set[str]] = {}
        ok_pairs = True
        for b, c in pairs:
            for obj in (b, c):
                if obj not in object_set:
                    problems.append(
                        f"preferences of agent {agent!r} reference unknown object {obj!r}"
                    )
                    ok_pairs = False
                elif obj not in adjacency.get(agent, ()):
                    problems.append(
                        f"preferences of agent {agent!r} compare non-adjacent object {obj!r}"
                    )
                    ok_pairs = False
            if b == c:
                problems.append(f"agent {agent!r} declares {b!r} better than itself")
                ok_pairs = False
            if ok_pairs:
                succ.setdefault(b, set()).add(c)
        if ok_pairs and _has_cycle(succ):
            problems.append(f"cyclic preferences for agent {agent!r}")

    if not problems:
        try:
            instance_from_document(doc)
        except InstanceError as exc:
            problems.append(str(exc))
    return ValidationReport(not problems, tuple(problems))


def _has_cycle(succ: Mapping[str, set[str]]) -> bool:
    color: dict[str, int] = {}

    def visit(node: str) -> bool:
        color[node] = 1
        for nxt in succ.get(node, ()):
            c = color.get(nxt, 0)
            if c == 1 or (c == 0 and visit(nxt)):
                return True
        color[node] = 2
        return False

    return any(color.get(n, 0) == 0 and visit(n) for n in sorted(succ))


# -- augmentation to equal sides ----------------------------------------------


@dataclass(frozen=True)
class AugmentationMap:
    """Records how an instance was padded to admit a perfect matching.

    ``restrict`` drops the padding from a matching of the target instance,
    leaving a maximum matching of the source.
    """

    source: Instance
    target: Instance
    dummy_agents: tuple[str, ...]
    artificial_objects: tuple[str, ...]

    def restrict(self, matching: Matching) -> Matching:
        dummies = set(self.dummy_agents)
        arts = set(self.artificial_objects)
        return Matching(
            (a, b) for a, b in matching if a not in dummies and b not in arts
        )


def augment_to_perfect(instance: Instance) -> tuple[Instance, AugmentationMap]:
    """Pad an instance so it admits a perfect matching, preserving popularity
    comparisons between maximum matchings of the original.

    Adds ``|B| - nu`` dummy agents (adjacent to all original objects,
    indifferent) and ``|A| - nu`` artificial objects (tied worst choices of
    every original agent), where ``nu`` is the maximum matching size.  If the
    instance already admits a perfect matching it is returned unchanged.
    """
    from .matching import BipartiteGraph, maximum_matching

    graph = BipartiteGraph(
        instance.n_agents,
        instance.n_objects,
        [list(instance.adj_indices(a)) for a in range(instance.n_agents)],
    )
    match_l, _ = maximum_matching(graph)
    nu = sum(1 for j in match_l if j >= 0)
    need_dummies = instance.n_objects - nu
    need_arts = instance.n_agents - nu
    if need_dummies == 0 and need_arts == 0:
        return instance, AugmentationMap(instance, instance, (), ())

    dummies = tuple(f"__dummy:{i}" for i in range(need_dummies))
    arts = tuple(f"__art:aug:{i}" for i in range(need_arts))
    for d in dummies:
        if instance.has_agent(d):
            raise InstanceError(f"agent identifier {d!r} collides with augmentation naming")
    for x in arts:
        if instance.has_object(x):
            raise InstanceError(f"object identifier {x!r} collides with augmentation naming")

    edges = list(instance.edges)
    edges.extend((d, b) for d in dummies for b in instance.objects)
    edges.extend((a, x) for a in instance.agents for x in arts)
    preferences: dict[str, list[tuple[str, str]]] = {}
    for a in instance.agents:
        pairs = list(instance.preference_pairs(a))
        pairs.extend((b, x) for b in instance.neighbors(a) for x in arts)
        if pairs:
            preferences[a] = pairs
    target = Instance(
        tuple(instance.agents) + dummies,
        tuple(instance.objects) + arts,
        edges,
        preferences,
    )
    return target, AugmentationMap(instance, target, dummies, arts)
