"""Constrained bi-objective minimization problems and the four built-ins.

A problem is a pair of pure evaluators over a box: objectives(x) -> (k,)
values to minimize, and constraints(x) -> (m,) values interpreted as
g_i(x) <= 0. Greater-equal constraints are stored negated so feasibility is
always "every g at most zero".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from coadea.expressions import compile_expression, split_constraint

#: Constraint slack above this counts as a violation.
FEASIBILITY_TOL = 1e-9

_NO_CONSTRAINTS = lambda x: np.empty(0)


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    n_var: int
    k: int
    objectives: Callable[[np.ndarray], np.ndarray]
    constraints: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=np.float64))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=np.float64))
        if self.lower.shape != (self.n_var,) or self.upper.shape != (self.n_var,):
            raise ValueError("bounds length must equal n_var")
        if np.any(self.lower > self.upper):
            raise ValueError(f"conflicting bounds for problem {self.name!r}")

    @property
    def bounds_range(self) -> np.ndarray:
        return self.upper - self.lower


def evaluate_objectives(problem: ProblemSpec, x: np.ndarray) -> np.ndarray:
    """Objective vector at x (minimization). x must lie within the bounds."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (problem.n_var,):
        raise ValueError(f"x must have {problem.n_var} coordinates")
    if np.any(x < problem.lower) or np.any(x > problem.upper):
        raise ValueError(f"x={x} outside the bounds of problem {problem.name!r}")
    return np.asarray(problem.objectives(x), dtype=np.float64)


def is_feasible(problem: ProblemSpec, x: np.ndarray) -> tuple[bool, np.ndarray]:
    """(feasible, violations) where violations[i] = max(0, g_i(x)).

    Feasible means inside the bounds and every constraint within
    FEASIBILITY_TOL of nonpositive.
    """
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(problem.constraints(x), dtype=np.float64)
    violations = np.maximum(g, 0.0)
    in_bounds = bool(np.all(x >= problem.lower) and np.all(x <= problem.upper))
    return in_bounds and bool(np.all(g <= FEASIBILITY_TOL)), violations


# ---------------------------------------------------------------------------
# Built-in problems


def _p1_objectives(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([4.0 * x1 + 4.0 * x2, (x1 - 5.0) ** 2 + (x2 - 5.0) ** 2])


def _p1_constraints(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([(x1 - 5.0) ** 2 + x2 ** 2 - 25.0])


def _p2_objectives(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([2.0 * x1 - x2, -x1])


def _p2_constraints(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([(x1 - 1.0) ** 3 + x2])


def _p3_objectives(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([(x1 - 2.0) ** 2 + 2.0 + (x2 - 1.0) ** 2 + 2.0, 9.0 * x1 + (x2 - 1.0) ** 2])


def _p3_constraints(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([x1 ** 2 + x2 ** 2 - 225.0, x1 + 3.0 * x2 + 10.0])


def _p4_objectives(x):
    x1, x2 = float(x[0]), float(x[1])
    return np.array([x1, (1.0 + x2) / x1])


def _p4_constraints(x):
    # x2 + 9 x1 >= 6 and -x2 + 9 x1 >= 1, negated to <= 0 form
    x1, x2 = float(x[0]), float(x[1])
    return np.array([6.0 - x2 - 9.0 * x1, 1.0 + x2 - 9.0 * x1])


_BUILTINS = {
    1: dict(objectives=_p1_objectives, constraints=_p1_constraints,
            lower=(0.0, 0.0), upper=(5.0, 3.0)),
    2: dict(objectives=_p2_objectives, constraints=_p2_constraints,
            lower=(0.0, 0.0), upper=(1.0, 1.0)),
    3: dict(objectives=_p3_objectives, constraints=_p3_constraints,
            lower=(-20.0, -20.0), upper=(20.0, 20.0)),
    # x1 lower bound 0.1 keeps the 1/x1 objective finite
    4: dict(objectives=_p4_objectives, constraints=_p4_constraints,
            lower=(0.1, 0.0), upper=(1.0, 5.0)),
}


def builtin(problem_id: int) -> ProblemSpec:
    """One of the four built-in constrained bi-objective benchmarks (ids 1-4)."""
    if problem_id not in _BUILTINS:
        raise ValueError(f"unknown builtin problem {problem_id!r} (expected 1-4)")
    spec = _BUILTINS[problem_id]
    return ProblemSpec(
        name=f"p{problem_id}",
        n_var=2,
        k=2,
        objectives=spec["objectives"],
        constraints=spec["constraints"],
        lower=np.array(spec["lower"]),
        upper=np.array(spec["upper"]),
    )


def from_expressions(
    name: str,
    objectives: Sequence[str],
    constraints: Sequence[str],
    lower: Sequence[float],
    upper: Sequence[float],
) -> ProblemSpec:
    """Build a problem from arithmetic expression strings in x1..xn.

    Objectives are bare expressions (minimized); constraints are
    "expr <= expr" or "expr >= expr" lines, normalized to g(x) <= 0.
    """
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    n_var = lower.shape[0]
    if len(objectives) < 2:
        raise ValueError("need at least two objective expressions")
    obj_fns = [compile_expression(text, n_var) for text in objectives]
    con_fns = [split_constraint(text, n_var) for text in constraints]

    def eval_objectives(x, _fns=tuple(obj_fns)):
        return np.array([fn(x) for fn in _fns])

    if con_fns:
        def eval_constraints(x, _fns=tuple(con_fns)):
            return np.array([fn(x) for fn in _fns])
    else:
        eval_constraints = _NO_CONSTRAINTS

    return ProblemSpec(
        name=name,
        n_var=n_var,
        k=len(obj_fns),
        objectives=eval_objectives,
        constraints=eval_constraints,
        lower=lower,
        upper=upper,
    )
