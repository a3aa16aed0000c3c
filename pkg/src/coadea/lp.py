"""Dense linear programming.

A small deterministic two-phase simplex on the full tableau, plus an
exhaustive vertex-enumeration solver used as an independent cross-check.
Instances here are tiny (a handful of variables, at most a few hundred
rows), so simplicity and reproducibility win over sparse machinery.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
OPT_TOL = 1e-9

ORACLE_MAX_VARS = 8
ORACLE_MAX_ROWS = 12

_RELATIONS = ("<=", "=", ">=")


class LpFormatError(ValueError):
    """Malformed instance: bad dimensions, bad relation symbol, non-finite data."""


class LpNumericalError(RuntimeError):
    """The solver reached a numerically singular state it cannot recover from."""


@dataclass
class LinearProgram:
    """A dense LP: optimize `objective_coeffs . x` subject to row relations and x >= lower_bounds.

    Parameters
    ----------
    sense : "min" or "max"
    objective_coeffs : (n,) array
    constraint_matrix : (m, n) array
    relations : length-m sequence of "<=", "=" or ">="
    rhs : (m,) array
    lower_bounds : (n,) array, defaults to zeros (plain nonnegativity)
    """

    sense: str
    objective_coeffs: np.ndarray
    constraint_matrix: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise LpFormatError(f"sense must be 'min' or 'max', got {self.sense!r}")
        self.objective_coeffs = np.atleast_1d(np.asarray(self.objective_coeffs, dtype=np.float64))
        self.constraint_matrix = np.atleast_2d(np.asarray(self.constraint_matrix, dtype=np.float64))
        self.rhs = np.atleast_1d(np.asarray(self.rhs, dtype=np.float64))
        self.relations = tuple(self.relations)
        m, n = self.constraint_matrix.shape
        if m < 1 or n < 1:
            raise LpFormatError("need at least one row and one variable")
        if self.objective_coeffs.shape != (n,):
            raise LpFormatError(
                f"objective has {self.objective_coeffs.shape[0]} coefficients, matrix has {n} columns"
            )
        if self.rhs.shape != (m,):
            raise LpFormatError(f"rhs has {self.rhs.shape[0]} entries, matrix has {m} rows")
        if len(self.relations) != m:
            raise LpFormatError(f"{len(self.relations)} relations for {m} rows")
        for rel in self.relations:
            if rel not in _RELATIONS:
                raise LpFormatError(f"unknown relation {rel!r}")
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(n)
        else:
            self.lower_bounds = np.atleast_1d(np.asarray(self.lower_bounds, dtype=np.float64))
            if self.lower_bounds.shape != (n,):
                raise LpFormatError("lower_bounds length does not match variable count")
        for arr in (self.objective_coeffs, self.constraint_matrix, self.rhs, self.lower_bounds):
            if not np.all(np.isfinite(arr)):
                raise LpFormatError("all coefficients must be finite")

    @property
    def num_rows(self) -> int:
        return self.constraint_matrix.shape[0]

    @property
    def num_vars(self) -> int:
        return self.constraint_matrix.shape[1]


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome. `objective_value` and `primal` are set only when optimal."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    objective_value: float | None = None
    primal: np.ndarray | None = None


def solve(lp: LinearProgram) -> LpSolution:
    """Solve an LP with a deterministic two-phase simplex.

    Dantzig pricing with lowest-index tie-breaks; Bland's rule takes over
    once the objective stalls for more than 2(m+n) pivots, so the method
    terminates on every instance. Statuses are exact classifications:
    "infeasible" and "unbounded" are ordinary outcomes, never exceptions.

    Raises
    ------
    LpFormatError
        Propagated from `LinearProgram` construction (malformed input never
        reaches the pivoting code).
    LpNumericalError
        Pivot magnitudes below tolerance after anti-cycling kicked in.
    """
    m, n = lp.num_rows, lp.num_vars
    lb = lp.lower_bounds
    # substitute x = lb + x' so the tableau only sees x' >= 0
    b = lp.rhs - lp.constraint_matrix @ lb
    c = lp.objective_coeffs if lp.sense == "min" else -lp.objective_coeffs

    status, x_shifted = _two_phase(lp.constraint_matrix.copy(), list(lp.relations), b.copy(), c)
    if status != "optimal":
        return LpSolution(status=status)
    x = x_shifted + lb
    value = float(lp.objective_coeffs @ x)
    return LpSolution(status="optimal", objective_value=value, primal=x)


def _two_phase(A: np.ndarray, relations: list[str], b: np.ndarray, c_min: np.ndarray) -> tuple[str, np.ndarray | None]:
    """Minimize c_min . x' over A x' rel b, x' >= 0. Returns (status, x')."""
    m, n = A.shape
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            if relations[i] == "<=":
                relations[i] = ">="
            elif relations[i] == ">=":
                relations[i] = "<="

    slack_rows = [i for i, r in enumerate(relations) if r != "="]
    art_rows = [i for i, r in enumerate(relations) if r != "<="]
    n_slack = len(slack_rows)
    n_art = len(art_rows)
    n_struct = n + n_slack  # columns surviving into phase 2
    ncols = n_struct + n_art

    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = np.full(m, -1, dtype=np.intp)
    for j, i in enumerate(slack_rows):
        T[i, n + j] = 1.0 if relations[i] == "<=" else -1.0
        if relations[i] == "<=":
            basis[i] = n + j
    for j, i in enumerate(art_rows):
        T[i, n_struct + j] = 1.0
        basis[i] = n_struct + j

    if n_art > 0:
        # phase 1: minimize the artificial total
        T[m, :] = 0.0
        T[m, n_struct:ncols] = 1.0
        for i in art_rows:
            T[m, :] -= T[i, :]
        status = _simplex(T, basis, ncols)
        if status != "optimal":  # phase-1 objective is bounded below by 0
            raise LpNumericalError("numerically singular: phase 1 reported unbounded")
        if -T[m, -1] > 1e-8 * max(1.0, float(np.max(np.abs(b)))):
            return "infeasible", None

        # drive leftover artificials out of the basis; all-zero rows are redundant
        drop_rows: list[int] = []
        for r in range(m):
            if basis[r] >= n_struct:
                piv_col = -1
                for j in range(n_struct):
                    if abs(T[r, j]) > PIVOT_TOL:
                        piv_col = j
                        break
                if piv_col < 0:
                    drop_rows.append(r)
                else:
                    _pivot(T, r, piv_col)
                    basis[r] = piv_col
        if drop_rows:
            keep = [r for r in range(m) if r not in drop_rows]
            T = T[keep + [m], :]
            basis = basis[keep]
            m = len(keep)

    # phase 2 on the structural columns only
    T2 = np.zeros((m + 1, n_struct + 1))
    T2[:m, :n_struct] = T[:m, :n_struct]
    T2[:m, -1] = T[:m, -1]
    T2[m, :n] = c_min
    for r in range(m):
        coeff = T2[m, basis[r]]
        if coeff != 0.0:
            T2[m, :] -= coeff * T2[r, :]
    status = _simplex(T2, basis, n_struct)
    if status != "optimal":
        return status, None

    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T2[r, -1]
    np.clip(x, 0.0, None, out=x)  # snap the tolerance-level negatives
    return "optimal", x


def _simplex(T: np.ndarray, basis: np.ndarray, ncols: int) -> str:
    """Run the simplex loop in place. Objective row is T[-1]; returns status."""
    m = T.shape[0] - 1
    stall_limit = 2 * (m + ncols)
    hard_cap = max(500, 50 * (m + ncols))
    best_obj = -T[-1, -1]
    stall = 0
    bland = False
    for _ in range(hard_cap):
        z = T[-1, :ncols]
        if not bland:
            j = int(np.argmin(z))
            if z[j] >= -OPT_TOL:
                return "optimal"
        else:
            neg = np.flatnonzero(z < -OPT_TOL)
            if neg.size == 0:
                return "optimal"
            j = int(neg[0])

        col = T[:m, j]
        rhs = T[:m, -1]
        leave = -1
        best_ratio = np.inf
        for i in range(m):
            if col[i] > PIVOT_TOL:
                ratio = rhs[i] / col[i]
                if leave < 0 or ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12 and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        if abs(T[leave, j]) <= PIVOT_TOL:
            raise LpNumericalError("numerically singular: pivot below tolerance")
        _pivot(T, leave, j)
        basis[leave] = j

        obj = -T[-1, -1]
        if obj < best_obj - 1e-12:
            best_obj = obj
            stall = 0
        else:
            stall += 1
            if stall > stall_limit:
                bland = True
    raise LpNumericalError("numerically singular: pivot limit exhausted")


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row, :] /= T[row, col]
    piv_row = T[row, :]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, piv_row)
    T[:, col] = 0.0
    T[row, col] = 1.0


def enumerate_vertices_oracle(lp: LinearProgram) -> LpSolution:
    """Exact reference solver by brute-force basic-solution enumeration.

    Every subset of n constraint/bound hyperplanes is intersected; feasible
    intersection points are candidate vertices and the best one is the
    optimum. Unboundedness is decided by enumerating the vertices of the
    normalized recession cone and looking for an improving direction.
    Exponential, so restricted to n <= 8 variables and m <= 12 rows.
    """
    m, n = lp.num_rows, lp.num_vars
    if n > ORACLE_MAX_VARS or m > ORACLE_MAX_ROWS:
        raise LpFormatError(
            f"oracle limited to {ORACLE_MAX_VARS} variables and {ORACLE_MAX_ROWS} rows, got n={n}, m={m}"
        )
    A = lp.constraint_matrix
    b = lp.rhs
    lb = lp.lower_bounds
    c_min = lp.objective_coeffs if lp.sense == "min" else -lp.objective_coeffs

    planes_a = np.vstack([A, np.eye(n)])
    planes_b = np.concatenate([b, lb])
    candidates = _intersection_points(planes_a, planes_b, n, forced=())
    feasible = [x for x in candidates if _point_feasible(lp, x)]
    if not feasible:
        return LpSolution(status="infeasible")

    if _has_improving_ray(lp, c_min):
        return LpSolution(status="unbounded")

    values = np.array([float(c_min @ x) for x in feasible])
    best = int(np.argmin(values))
    x = feasible[best]
    return LpSolution(status="optimal", objective_value=float(lp.objective_coeffs @ x), primal=x)


def _intersection_points(planes_a: np.ndarray, planes_b: np.ndarray, n: int, forced: tuple[int, ...]) -> list[np.ndarray]:
    """All nonsingular intersections of n planes, `forced` indices always active."""
    pool = [i for i in range(planes_a.shape[0]) if i not in forced]
    need = n - len(forced)
    combos = [tuple(forced) + combo for combo in combinations(pool, need)]
    if not combos:
        return []
    idx = np.array(combos, dtype=np.intp)
    A_stack = planes_a[idx]  # (K, n, n)
    b_stack = planes_b[idx]
    # Hadamard-style relative determinant filter, then a residual check on the solves
    row_norms = np.linalg.norm(A_stack, axis=2)
    scale = np.prod(np.maximum(row_norms, 1e-30), axis=1)
    dets = np.linalg.det(A_stack)
    ok = np.abs(dets) > 1e-10 * scale
    if not np.any(ok):
        return []
    X = np.linalg.solve(A_stack[ok], b_stack[ok][..., None])[..., 0]
    resid = np.max(np.abs(np.einsum("kij,kj->ki", A_stack[ok], X) - b_stack[ok]), axis=1)
    good = resid <= 1e-7 * np.maximum(1.0, np.max(np.abs(b_stack[ok]), axis=1))
    return [X[i] for i in range(X.shape[0]) if good[i]]


def _point_feasible(lp: LinearProgram, x: np.ndarray) -> bool:
    if np.any(x < lp.lower_bounds - 1e-8 * np.maximum(1.0, np.abs(lp.lower_bounds))):
        return False
    lhs = lp.constraint_matrix @ x
    tol = 1e-8 * np.maximum(1.0, np.abs(lp.rhs)) + 1e-9 * (np.abs(lp.constraint_matrix) @ np.abs(x))
    for i, rel in enumerate(lp.relations):
        if rel == "<=" and lhs[i] > lp.rhs[i] + tol[i]:
            return False
        if rel == ">=" and lhs[i] < lp.rhs[i] - tol[i]:
            return False
        if rel == "=" and abs(lhs[i] - lp.rhs[i]) > tol[i]:
            return False
    return True


def _has_improving_ray(lp: LinearProgram, c_min: np.ndarray) -> bool:
    """Does the recession cone contain d with c_min . d < 0?

    Recession directions of {A x rel b, x >= lb} satisfy d >= 0 plus the
    homogeneous row relations; normalizing by sum(d) = 1 turns the cone into
    a polytope whose vertices the point enumerator can list.
    """
    m, n = lp.num_rows, lp.num_vars
    A = lp.constraint_matrix
    planes_a = np.vstack([np.ones((1, n)), A, np.eye(n)])
    planes_b = np.concatenate([[1.0], np.zeros(m + n)])
    for d in _intersection_points(planes_a, planes_b, n, forced=(0,)):
        if np.any(d < -1e-8):
            continue
        lhs = A @ d
        tol = 1e-8 + 1e-9 * (np.abs(A) @ np.abs(d))
        ok = True
        for i, rel in enumerate(lp.relations):
            if rel == "<=" and lhs[i] > tol[i]:
                ok = False
                break
            if rel == ">=" and lhs[i] < -tol[i]:
                ok = False
                break
            if rel == "=" and abs(lhs[i]) > tol[i]:
                ok = False
                break
        if ok and float(c_min @ d) < -1e-9:
            return True
    return False
