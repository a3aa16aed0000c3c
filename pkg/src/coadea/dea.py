"""CCR efficiency scoring of objective-vector sets.

Habitats' objective vectors (minimization sense) become DEA inputs of a
CCR multiplier model with one constant dummy output pinned to 1, so the
model for unit o collapses to

    theta_o = min { v . x_o  :  v . x_j >= 1 for all units j,  v >= 0 }.

theta is 1 exactly on the lower-left convex-hull boundary of the point set
and grows with depth into the hull; the reported score is 1/theta. Inputs
must be strictly positive, hence the shift step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coadea import _kernels
from coadea.lp import LinearProgram

#: |theta - 1| below this snaps to exactly 1 (LP optimality noise).
THETA_SNAP_TOL = 1e-9


class DeaError(RuntimeError):
    """A per-unit efficiency solve failed."""


@dataclass(frozen=True)
class DmuSet:
    """Objective vectors translated into strictly positive DEA inputs."""

    raw_points: np.ndarray      # (N, k), minimization sense
    shift: np.ndarray           # (k,) per-dimension translation
    shifted_points: np.ndarray  # raw_points + shift, all entries >= epsilon

    @property
    def size(self) -> int:
        return self.raw_points.shape[0]

    @property
    def dim(self) -> int:
        return self.raw_points.shape[1]


@dataclass(frozen=True)
class EfficiencyReport:
    theta: np.ndarray      # (N,) optimal ratios, >= 1
    score: np.ndarray      # (N,) 1/theta in (0, 1]
    efficient: np.ndarray  # (N,) bool, theta <= 1 + eff_tol


def shift_to_positive(raw_points: np.ndarray, epsilon_shift: float = 0.1) -> DmuSet:
    """Translate each dimension so every coordinate is at least epsilon_shift.

    shift[i] = max(0, epsilon_shift - min_j raw[j][i]); dimensions already
    positive enough are left untouched.
    """
    raw = np.atleast_2d(np.asarray(raw_points, dtype=np.float64))
    if raw.size == 0:
        raise ValueError("empty point set")
    if not np.all(np.isfinite(raw)):
        raise ValueError("points must be finite")
    shift = np.maximum(0.0, epsilon_shift - raw.min(axis=0))
    return DmuSet(raw_points=raw, shift=shift, shifted_points=raw + shift)


def build_ccr(dmus: DmuSet, o: int) -> LinearProgram:
    """The multiplier-form model for unit o over the shifted set.

    With the dummy output normalized away: minimize v . x_o subject to
    v . x_j >= 1 for every unit j and v >= 0 (k variables, N rows).
    """
    if not 0 <= o < dmus.size:
        raise IndexError(f"DMU index {o} out of range for {dmus.size} units")
    X = dmus.shifted_points
    return LinearProgram(
        sense="min",
        objective_coeffs=X[o].copy(),
        constraint_matrix=X.copy(),
        relations=(">=",) * dmus.size,
        rhs=np.ones(dmus.size),
    )


def efficiency_scores(
    raw_points: np.ndarray,
    epsilon_shift: float = 0.1,
    eff_tol: float = 1e-6,
) -> EfficiencyReport:
    """Shift once, solve one CCR model per unit, report theta / score / flags.

    Identical rows share a single solve (their models coincide). theta values
    within LP tolerance of 1 are snapped to exactly 1; the self-constraint
    v . x_o >= 1 guarantees the true optimum is never below 1.
    """
    dmus = shift_to_positive(raw_points, epsilon_shift)
    X = dmus.shifted_points
    uniq, inverse = np.unique(X, axis=0, return_inverse=True)
    theta_uniq = _kernels.ccr_theta_batch(uniq)
    theta = np.asarray(theta_uniq)[inverse.reshape(-1)]

    bad = np.flatnonzero(~np.isfinite(theta))
    if bad.size:
        raise DeaError(f"CCR efficiency solve failed for DMU {int(bad[0])}")
    low = np.flatnonzero(theta < 1.0 - 1e-7)
    if low.size:
        raise DeaError(
            f"CCR solve for DMU {int(low[0])} returned theta={theta[low[0]]!r} < 1; "
            "the self-constraint makes this impossible"
        )
    theta = np.where(np.abs(theta - 1.0) <= THETA_SNAP_TOL, 1.0, theta)
    return EfficiencyReport(theta=theta, score=1.0 / theta, efficient=theta <= 1.0 + eff_tol)
