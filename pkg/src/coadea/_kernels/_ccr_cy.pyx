# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch CCR efficiency kernel.

Same algorithm as the pure fallback (`_ccr_py`): per decision-making unit,
solve the k-row dual of  min { v . x_o : v . x_j >= 1, v >= 0 }  with a
deterministic simplex (Dantzig pricing, Bland's rule after a stall window),
warm-started from the previous unit's optimal basis whenever that basis is
still feasible for the new right-hand side. This loop dominates the runtime
of an experiment, hence the C translation.
"""
import numpy as np

from libc.math cimport fabs, INFINITY, NAN, isnan


def ccr_theta_batch(shifted_points, double opt_tol=1e-9, double pivot_tol=1e-10, int max_pivots=0):
    """Efficiency ratios theta for every row of a strictly positive (N, k) matrix."""
    X_arr = np.ascontiguousarray(shifted_points, dtype=np.float64)
    if X_arr.ndim != 2 or X_arr.shape[0] < 1 or X_arr.shape[1] < 1:
        raise ValueError("expected a nonempty (N, k) point matrix")
    cdef double[:, ::1] X = X_arr
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t k = X.shape[1]
    cdef Py_ssize_t ncols = N + k
    cdef Py_ssize_t cap = max_pivots if max_pivots > 0 else max(200, 20 * ncols)
    cdef Py_ssize_t bland_after = 2 * ncols

    theta_arr = np.empty(N, dtype=np.float64)
    cdef double[::1] theta = theta_arr
    T_arr = np.empty((k + 1, ncols + 1), dtype=np.float64)
    cdef double[:, ::1] T = T_arr
    basis_arr = np.empty(k, dtype=np.intp)
    cdef Py_ssize_t[::1] basis = basis_arr
    rhs_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] rhs = rhs_arr

    cdef bint warm = False
    cdef bint feasible
    cdef double acc, total
    cdef Py_ssize_t o, i, j
    for o in range(N):
        if warm:
            # rhs at the held basis: the slack columns store the basis inverse
            feasible = True
            for i in range(k):
                acc = 0.0
                for j in range(k):
                    acc += T[i, N + j] * X[o, j]
                rhs[i] = acc
                if acc < 0.0:
                    feasible = False
            if feasible:
                total = 0.0
                for i in range(k):
                    T[i, ncols] = rhs[i]
                    if basis[i] < N:
                        total += rhs[i]
                T[k, ncols] = total
                theta[o] = total
                continue
        for i in range(k):
            for j in range(N):
                T[i, j] = X[j, i]
            for j in range(k):
                T[i, N + j] = 1.0 if j == i else 0.0
            T[i, ncols] = X[o, i]
            basis[i] = N + i
        for j in range(N):
            T[k, j] = -1.0
        for j in range(N, ncols + 1):
            T[k, j] = 0.0
        theta[o] = _solve_one(T, basis, k, ncols, opt_tol, pivot_tol, cap, bland_after)
        warm = not isnan(theta[o])
    return theta_arr


cdef double _solve_one(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t k,
                       Py_ssize_t ncols, double opt_tol, double pivot_tol,
                       Py_ssize_t cap, Py_ssize_t bland_after):
    cdef Py_ssize_t it, i, j, enter, leave
    cdef double zbest, a, ratio, best_ratio, piv, f
    for it in range(cap):
        enter = -1
        if it < bland_after:
            zbest = -opt_tol
            for j in range(ncols):
                if T[k, j] < zbest:
                    zbest = T[k, j]
                    enter = j
        else:
            for j in range(ncols):
                if T[k, j] < -opt_tol:
                    enter = j
                    break
        if enter < 0:
            return T[k, ncols]

        leave = -1
        best_ratio = INFINITY
        for i in range(k):
            a = T[i, enter]
            if a > pivot_tol:
                ratio = T[i, ncols] / a
                if leave < 0 or ratio < best_ratio - 1e-12 or (
                    fabs(ratio - best_ratio) <= 1e-12 and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return NAN
        piv = T[leave, enter]
        if fabs(piv) <= pivot_tol:
            return NAN
        for j in range(ncols + 1):
            T[leave, j] /= piv
        for i in range(k + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(ncols + 1):
                        T[i, j] -= f * T[leave, j]
        basis[leave] = enter
    return NAN
