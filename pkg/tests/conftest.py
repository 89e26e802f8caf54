from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from popassign import Instance, instance_from_document

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("suite")


def _complete(n: int, prefs: dict[str, dict]) -> dict:
    agents = [f"a{i}" for i in range(1, n + 1)]
    objects = [f"b{j}" for j in range(1, n + 1)]
    return {
        "agents": agents,
        "objects": objects,
        "edges": [[a, b] for a in agents for b in objects],
        "preferences": prefs,
    }


@pytest.fixture(scope="session")
def unanimous_k33() -> Instance:
    """Complete 3x3, everyone ranks b1 > b2 > b3: no popular assignment."""
    chain = {"tiers": [["b1"], ["b2"], ["b3"]]}
    return instance_from_document(
        _complete(3, {a: chain for a in ("a1", "a2", "a3")})
    )


@pytest.fixture(scope="session")
def partial_order_triple() -> Instance:
    """Complete 3x3 with genuinely partial (non-weak) orders.

    Agents a, b, c over objects x, y, z with a: x > z and y > z;
    b: x > z only; c: y > x and y > z.  The instance where the weak-ranking
    matching characterization breaks down, and the worked example for the
    level traces.
    """
    return instance_from_document(
        {
            "agents": ["a", "b", "c"],
            "objects": ["x", "y", "z"],
            "edges": [[u, v] for u in "abc" for v in "xyz"],
            "preferences": {
                "a": {"pairs": [["x", "z"], ["y", "z"]]},
                "b": {"pairs": [["x", "z"]]},
                "c": {"pairs": [["y", "x"], ["y", "z"]]},
            },
        }
    )


@pytest.fixture(scope="session")
def assignment_not_matching() -> Instance:
    """a1, a2: b1 > b2; a3: b1 > b2 > b3.  Admits a popular assignment but no
    popular matching."""
    return instance_from_document(
        {
            "agents": ["a1", "a2", "a3"],
            "objects": ["b1", "b2", "b3"],
            "edges": [
                ["a1", "b1"],
                ["a1", "b2"],
                ["a2", "b1"],
                ["a2", "b2"],
                ["a3", "b1"],
                ["a3", "b2"],
                ["a3", "b3"],
            ],
            "preferences": {
                "a1": {"tiers": [["b1"], ["b2"]]},
                "a2": {"tiers": [["b1"], ["b2"]]},
                "a3": {"tiers": [["b1"], ["b2"], ["b3"]]},
            },
        }
    )


@pytest.fixture(scope="session")
def unanimous_k33_doc() -> dict:
    chain = {"tiers": [["b1"], ["b2"], ["b3"]]}
    return _complete(3, {a: chain for a in ("a1", "a2", "a3")})
