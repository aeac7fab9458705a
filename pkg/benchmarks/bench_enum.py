"""Timing comparison of the compiled and pure enumeration kernels.

Runs the exhaustive energy histogram on a few networks with both kernel
implementations, checks they agree, and prints a table with the speedup.

    python3 benchmarks/bench_enum.py [--full]

``--full`` adds a five-vertex case with about eight million assignments,
which takes a while on the pure kernel.
"""

from __future__ import annotations

import argparse
import math
import time

from rtnflow import _enum_py, oracle
from rtnflow.graphs import Graph, lattice, series_chain

try:
    from rtnflow import _enum_core
except ImportError:
    _enum_core = None


def timed_histogram(kernel, g: Graph, n: int) -> tuple[float, dict[int, int]]:
    previous = oracle._kernel
    oracle._kernel = kernel
    try:
        start = time.perf_counter()
        hist = oracle.hamiltonian_histogram(g, g.bipartition(), n, budget=1e10)
        return time.perf_counter() - start, hist
    finally:
        oracle._kernel = previous


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true", help="add the largest case")
    args = parser.parse_args()

    cases = [
        ("lattice 2x3, n=3", lattice(2, 3), 3),
        ("lattice 2x4, n=3", lattice(2, 4), 3),
        ("chain 4, n=4", series_chain(4), 4),
    ]
    if args.full:
        cases.append(("chain 5, n=4", series_chain(5), 4))

    header = f"{'case':<18} {'states':>12} {'pure':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, g, n in cases:
        states = math.factorial(n) ** len(g.vertices)
        pure_time, pure_hist = timed_histogram(_enum_py, g, n)
        if _enum_core is None:
            print(f"{name:<18} {states:>12} {pure_time:>9.3f}s {'n/a':>10} {'n/a':>8}")
            continue
        core_time, core_hist = timed_histogram(_enum_core, g, n)
        assert core_hist == pure_hist, f"kernel disagreement on {name}"
        speedup = pure_time / core_time if core_time else float("inf")
        print(
            f"{name:<18} {states:>12} {pure_time:>9.3f}s {core_time:>9.3f}s "
            f"{speedup:>7.1f}x"
        )
    if _enum_core is None:
        print("\ncompiled kernel not built; install without RTNFLOW_NO_EXT to get it")


if __name__ == "__main__":
    main()
