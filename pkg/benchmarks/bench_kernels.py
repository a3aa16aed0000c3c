#!/usr/bin/env python3
"""Benchmark the compiled CCR kernel against the pure-numpy fallback.

The batched efficiency solve is the hot loop of every experiment; this script
times both backends on synthetic populations and checks that they agree.

    python benchmarks/bench_kernels.py --sizes 50,100,250,500 --repeats 5
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from coadea._kernels import _ccr_py

try:
    from coadea._kernels import _ccr_cy
except ImportError:
    _ccr_cy = None


def time_fn(fn, points, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(points)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,100,250,500",
                        help="comma-separated population sizes")
    parser.add_argument("--k", type=int, default=2, help="objective count")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    if _ccr_cy is None:
        print("compiled kernel not built (run `python setup.py build_ext --inplace`); "
              "timing the pure backend only")

    header = f"{'N':>6} {'pure (ms)':>12}"
    if _ccr_cy is not None:
        header += f" {'cython (ms)':>12} {'speedup':>9} {'max |diff|':>11}"
    print(header)
    for n in sizes:
        points = rng.uniform(0.1, 10.0, size=(n, args.k))
        t_py = time_fn(_ccr_py.ccr_theta_batch, points, args.repeats)
        line = f"{n:>6} {t_py * 1e3:>12.2f}"
        if _ccr_cy is not None:
            t_cy = time_fn(_ccr_cy.ccr_theta_batch, points, args.repeats)
            diff = float(np.max(np.abs(
                _ccr_py.ccr_theta_batch(points) - _ccr_cy.ccr_theta_batch(points)
            )))
            line += f" {t_cy * 1e3:>12.2f} {t_py / t_cy:>8.1f}x {diff:>11.2e}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
