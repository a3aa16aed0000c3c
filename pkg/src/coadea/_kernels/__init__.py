"""Hot numeric kernels, with a compiled core and a pure-numpy fallback.

The batched CCR efficiency solve is where an experiment spends nearly all
its time, so it is written twice: once in Cython (built by setup.py when a
compiler is available) and once in numpy. Whichever imports first wins;
`BACKEND` records the choice so benchmarks and logs can report it.
"""
from __future__ import annotations

try:
    from coadea._kernels._ccr_cy import ccr_theta_batch

    BACKEND = "cython"
except ImportError:
    from coadea._kernels._ccr_py import ccr_theta_batch

    BACKEND = "python"

__all__ = ["ccr_theta_batch", "BACKEND"]
