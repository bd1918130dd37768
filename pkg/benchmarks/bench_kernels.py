"""Benchmark the compiled kernels against the pure fallback.

Usage: python benchmarks/bench_kernels.py [--quick]

Covers the two hot paths: full-cube inner evaluation (drives verification and
the information reports) and the fiber-refinement feasibility test (drives the
exhaustive search).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from comploc._kernels import pure

try:
    from comploc._kernels import _speedups
except ImportError:
    _speedups = None

from comploc.constructions import build_hw
from comploc.search import candidate_pool


def time_call(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_inner_patterns(n: int, k: int, repeats: int):
    c = build_hw(n, k)
    supp_flat, supp_off, tab_flat, tab_off = c._kernel_args
    size = 1 << n
    results = {}
    results["pure"] = time_call(
        lambda: pure.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off),
        repeats,
    )
    if _speedups is not None:
        results["compiled"] = time_call(
            lambda: _speedups.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off),
            repeats,
        )
        a = pure.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off)
        b = _speedups.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off)
        assert np.array_equal(a, b), "backends disagree"
    return f"inner_patterns hw({n},{k}) m={c.m} over 2^{n} inputs", results


def bench_feasibility(n: int, k: int, m: int, checks: int):
    from comploc.boolfn import named_function

    f = named_function("maj", n)
    values = np.ascontiguousarray(f.values, dtype=np.uint8)
    pool = candidate_pool(n, k)
    rng = np.random.default_rng(5)
    batches = [
        [pool[int(i)].column for i in rng.integers(0, len(pool), size=m)]
        for _ in range(checks)
    ]

    slow = pure.FeasibilityChecker(values, 1 << n, m)

    def run_pure():
        for cols in batches:
            slow.feasible(cols)

    results = {"pure": time_call(run_pure, 3)}
    if _speedups is not None:
        from comploc._kernels import _CompiledFeasibilityChecker

        fast = _CompiledFeasibilityChecker(values, 1 << n, m)

        def run_compiled():
            for cols in batches:
                fast.feasible(cols)

        results["compiled"] = time_call(run_compiled, 3)
        mismatch = [
            cols for cols in batches[:200] if fast.feasible(cols) != slow.feasible(cols)
        ]
        assert not mismatch, "backends disagree"
    return f"feasibility n={n} k={k} m={m}, {checks} multiset checks", results


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller instances")
    args = parser.parse_args()

    if _speedups is None:
        print("compiled extension not built; timing the pure backend only\n")

    if args.quick:
        cases = [
            bench_inner_patterns(12, 3, repeats=5),
            bench_feasibility(5, 2, 4, checks=2_000),
        ]
    else:
        cases = [
            bench_inner_patterns(16, 2, repeats=5),
            bench_inner_patterns(18, 3, repeats=3),
            bench_feasibility(6, 3, 4, checks=20_000),
            bench_feasibility(6, 2, 5, checks=20_000),
        ]

    width = max(len(label) for label, _ in cases)
    for label, results in cases:
        parts = [f"{name}: {seconds * 1e3:9.3f} ms" for name, seconds in results.items()]
        if "compiled" in results:
            parts.append(f"speedup: {results['pure'] / results['compiled']:6.1f}x")
        print(f"{label:<{width}}  " + "  ".join(parts))


if __name__ == "__main__":
    main()
