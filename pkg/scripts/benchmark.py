#!/usr/bin/env python3
"""Time the level solver on dense random instances of growing size.

Reports wall time, iteration count, and the n^2 iteration envelope for each
size; found and not-found runs are both interesting (not-found runs drive the
levels all the way up and are the slow case).

Example:
    python3 scripts/benchmark.py --sizes 50,100,200 --repeats 3
"""

from __future__ import annotations

import argparse
import time

from popassign import instance_from_document, solve_popular_assignment
from popassign.cli import random_instance_document


def bench_one(n: int, density: float, style: str, seed: int, repeats: int):
    doc = random_instance_document(n, n, density, style, seed)
    instance = instance_from_document(doc)
    best = float("inf")
    outcome = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        outcome = solve_popular_assignment(instance)
        best = min(best, time.perf_counter() - t0)
    return outcome, best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="25,50,100,200")
    parser.add_argument("--density", type=float, default=1.0)
    parser.add_argument(
        "--style", default="strict", choices=("strict", "weak", "partial")
    )
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    print(f"{'n':>5} {'outcome':>10} {'iterations':>11} {'n^2':>8} {'best (s)':>9}")
    for n in (int(x) for x in args.sizes.split(",")):
        outcome, best = bench_one(n, args.density, args.style, args.seed, args.repeats)
        label = "found" if outcome.found else "not-found"
        assert outcome.iterations <= n * n, "iteration envelope exceeded"
        print(f"{n:>5} {label:>10} {outcome.iterations:>11} {n * n:>8} {best:>9.3f}")


if __name__ == "__main__":
    main()
