"""Pure-numpy fallback for the batched CCR efficiency kernel.

Each decision-making unit o needs

    theta_o = min { v . x_o : v . x_j >= 1 for all j, v >= 0 }

over a shared strictly positive point matrix. The kernel solves the LP dual,

    max sum(y) subject to X^T y <= x_o, y >= 0,

whose tableau has only k rows (k = objective count), starts feasible at the
slack basis, and is always bounded because every column of X^T is positive.
Strong duality makes the dual optimum equal theta_o exactly.

Only the right-hand side changes between units, so the previous unit's
optimal basis is tried first: the tableau's matrix part and reduced costs
depend on the basis alone, and the slack columns hold the basis inverse, so
when B^-1 x_o stays nonnegative the solved tableau is already optimal for
the new unit. Otherwise the unit is solved from scratch. Failed solves
(pivot cap, degenerate breakdown) are reported as NaN, never as a wrong
value.
"""
from __future__ import annotations

import numpy as np

_RATIO_TIE = 1e-12


def ccr_theta_batch(
    shifted_points: np.ndarray,
    opt_tol: float = 1e-9,
    pivot_tol: float = 1e-10,
    max_pivots: int = 0,
) -> np.ndarray:
    """Efficiency ratios theta for every row of a strictly positive (N, k) matrix.

    max_pivots <= 0 selects an automatic cap proportional to the tableau width.
    """
    X = np.ascontiguousarray(shifted_points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("expected a nonempty (N, k) point matrix")
    N, k = X.shape
    ncols = N + k
    cap = max_pivots if max_pivots > 0 else max(200, 20 * ncols)
    bland_after = 2 * ncols

    B = X.T
    eye = np.eye(k)
    theta = np.empty(N)
    T = np.empty((k + 1, ncols + 1))
    basis = np.empty(k, dtype=np.intp)
    slack_basis = np.arange(N, ncols, dtype=np.intp)
    warm = False
    for o in range(N):
        if warm:
            rhs = T[:k, N:ncols] @ X[o]
            if rhs.min() >= 0.0:
                T[:k, ncols] = rhs
                T[k, ncols] = rhs[basis < N].sum()
                theta[o] = T[k, ncols]
                continue
        T[:k, :N] = B
        T[:k, N:ncols] = eye
        T[:k, ncols] = X[o]
        T[k, :N] = -1.0
        T[k, N:] = 0.0
        basis[:] = slack_basis
        theta[o] = _solve_one(T, basis, k, ncols, opt_tol, pivot_tol, cap, bland_after)
        warm = not np.isnan(theta[o])
    return theta


def _solve_one(T, basis, k, ncols, opt_tol, pivot_tol, cap, bland_after) -> float:
    z = T[k]
    for it in range(cap):
        if it < bland_after:
            j = int(np.argmin(z[:ncols]))
            if z[j] >= -opt_tol:
                return z[ncols]
        else:
            neg = np.flatnonzero(z[:ncols] < -opt_tol)
            if neg.size == 0:
                return z[ncols]
            j = int(neg[0])  # Bland: lowest eligible index

        leave = -1
        best_ratio = np.inf
        for i in range(k):
            a = T[i, j]
            if a > pivot_tol:
                ratio = T[i, ncols] / a
                if leave < 0 or ratio < best_ratio - _RATIO_TIE or (
                    abs(ratio - best_ratio) <= _RATIO_TIE and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return np.nan  # unbounded dual: impossible for positive data
        piv = T[leave, j]
        if abs(piv) <= pivot_tol:
            return np.nan
        T[leave, :] /= piv
        piv_row = T[leave, :]
        for i in range(k + 1):
            if i != leave:
                f = T[i, j]
                if f != 0.0:
                    T[i, :] -= f * piv_row
        basis[leave] = j
    return np.nan
