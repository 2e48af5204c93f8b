#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths (per-feature medians and per-sample boxplot
summaries) on matrices shaped like real studies: a few dozen samples by
10^4..10^6 features.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from rlekit import kernels


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="smaller sizes, fewer repeats")
    args = parser.parse_args()

    sizes = [(30, 10_000), (30, 100_000)] if args.quick else \
        [(30, 10_000), (30, 100_000), (30, 1_000_000), (100, 100_000)]
    repeats = 3 if args.quick else 5

    if kernels._NUMBA_IMPLS is None:
        print("numba backend unavailable (RLEKIT_NUMBA=0 or numba missing); "
              "benchmarking the numpy path only")
    else:
        # trigger JIT compilation outside the timed region
        warm = np.random.default_rng(0).standard_normal((4, 64))
        kernels._NUMBA_IMPLS[0](warm)
        kernels._NUMBA_IMPLS[1](warm, np.zeros(64), 0, 1.5)

    print(f"{'shape':>16}  {'kernel':<14} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    print("-" * 64)
    rng = np.random.default_rng(42)
    for m, n in sizes:
        values = rng.standard_normal((m, n))
        center = np.ascontiguousarray(np.median(values, axis=0))

        cases = [
            ("column_medians",
             lambda: kernels._column_medians_numpy(values),
             None if kernels._NUMBA_IMPLS is None
             else (lambda: kernels._NUMBA_IMPLS[0](values))),
            ("row_summaries",
             lambda: kernels._row_summaries_numpy(values, center, 0, 1.5),
             None if kernels._NUMBA_IMPLS is None
             else (lambda: kernels._NUMBA_IMPLS[1](values, center, 0, 1.5))),
        ]
        for name, numpy_fn, numba_fn in cases:
            t_np = best_of(numpy_fn, repeats)
            if numba_fn is None:
                print(f"{m}x{n:>9}  {name:<14} {t_np * 1e3:>8.1f}ms {'-':>10} {'-':>8}")
                continue
            t_nb = best_of(numba_fn, repeats)
            print(f"{m}x{n:>9}  {name:<14} {t_np * 1e3:>8.1f}ms "
                  f"{t_nb * 1e3:>8.1f}ms {t_np / t_nb:>7.2f}x")


if __name__ == "__main__":
    main()
