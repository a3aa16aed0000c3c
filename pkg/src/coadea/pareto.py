"""Pareto dominance, frontier filtering, reference fronts, and quality metrics.

All operations are pure and minimization-sense. Dominance is the standard
one: no worse everywhere, strictly better somewhere, so equal points never
dominate each other and duplicates survive filtering.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from coadea.problems import ProblemSpec, is_feasible


def dominates(a, b) -> bool:
    """True iff a <= b componentwise with at least one strict coordinate."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def non_dominated_filter(points) -> np.ndarray:
    """Indices (ascending) of all points not dominated by any other point.

    Duplicates are all retained. Two objectives use an O(N log N) sweep;
    higher dimensions fall back to pairwise comparison.
    """
    f = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n, k = f.shape
    if n == 0:
        raise ValueError("empty point set")
    if k == 2:
        mask = _sweep_mask_2d(f)
    else:
        mask = np.ones(n, dtype=bool)
        for i in range(n):
            le = np.all(f <= f[i], axis=1)
            lt = np.any(f < f[i], axis=1)
            if np.any(le & lt):
                mask[i] = False
    return np.flatnonzero(mask)


def _sweep_mask_2d(f: np.ndarray) -> np.ndarray:
    """Sorted sweep: a point survives iff its f2 beats every strictly-smaller-f1
    point and matches its own f1-group minimum."""
    order = np.lexsort((f[:, 1], f[:, 0]))
    f1s = f[order, 0]
    f2s = f[order, 1]
    uniq, group = np.unique(f1s, return_inverse=True)
    group_min = np.full(uniq.shape[0], np.inf)
    np.minimum.at(group_min, group, f2s)
    prefix = np.minimum.accumulate(group_min)
    strict_min = np.concatenate([[np.inf], prefix[:-1]])  # min f2 over smaller f1
    ok_sorted = (f2s < strict_min[group]) & (f2s == group_min[group])
    mask = np.zeros(f.shape[0], dtype=bool)
    mask[order] = ok_sorted
    return mask


def reference_front(problem: ProblemSpec, grid_points_per_dim: int = 200) -> np.ndarray:
    """Brute-force Pareto front: evaluate a uniform grid over the bounds, keep
    feasible points, filter to the non-dominated set.

    Returns the front sorted by (f1, f2, ...). The grid is exponential in the
    variable count, so only small problems (n_var <= 3) are accepted.
    """
    if problem.n_var > 3:
        raise ValueError("reference_front supports at most 3 decision variables")
    if grid_points_per_dim < 10:
        raise ValueError("grid_points_per_dim must be at least 10")
    axes = [
        np.linspace(problem.lower[i], problem.upper[i], grid_points_per_dim)
        for i in range(problem.n_var)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    feasible_f = []
    for x in grid:
        ok, _ = is_feasible(problem, x)
        if ok:
            feasible_f.append(problem.objectives(x))
    if not feasible_f:
        raise ValueError(f"no feasible grid point for problem {problem.name!r}")
    f = np.asarray(feasible_f)
    front = f[non_dominated_filter(f)]
    return front[np.lexsort(tuple(front[:, i] for i in reversed(range(front.shape[1]))))]


def generational_distance(front, reference) -> float:
    """Mean Euclidean distance from front members to their nearest reference member."""
    f = np.atleast_2d(np.asarray(front, dtype=np.float64))
    r = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    if f.size == 0 or r.size == 0:
        raise ValueError("front and reference must both be nonempty")
    d = np.sqrt(((f[:, None, :] - r[None, :, :]) ** 2).sum(axis=2))
    return float(d.min(axis=1).mean())


def hypervolume_2d(front, ref_point) -> float:
    """Area dominated by a 2-D front and bounded by ref_point (sorted sweep).

    Members not componentwise <= ref_point are excluded rather than rejected;
    an empty effective front has hypervolume 0.
    """
    ref = np.asarray(ref_point, dtype=np.float64)
    if ref.shape != (2,):
        raise ValueError("ref_point must have exactly 2 coordinates")
    f = np.asarray(front, dtype=np.float64).reshape(-1, 2) if len(front) else np.empty((0, 2))
    keep = np.all(f <= ref, axis=1) if f.size else np.zeros(0, dtype=bool)
    f = f[keep]
    if f.shape[0] == 0:
        return 0.0
    order = np.lexsort((f[:, 1], f[:, 0]))
    f1 = f[order, 0]
    f2 = f[order, 1]
    # ceiling of each point's rectangle: the best f2 seen so far (ref to start)
    prev = np.concatenate([[ref[1]], np.minimum.accumulate(f2)[:-1]])
    contributing = f2 < prev
    return float(((ref[0] - f1) * (prev - f2))[contributing].sum())


def spacing(front) -> float:
    """Population standard deviation of nearest-neighbor distances (0 for size <= 2)."""
    f = np.atleast_2d(np.asarray(front, dtype=np.float64))
    n = f.shape[0]
    if n <= 2:
        return 0.0
    d = np.sqrt(((f[:, None, :] - f[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    nearest = d.min(axis=1)
    return float(nearest.std())


def farthest_point_subset(f: np.ndarray, m: int) -> np.ndarray:
    """Indices of a size-m subset greedily maximizing spread in objective space.

    Seeds with each objective's argmin, then repeatedly adds the point with
    the largest distance to the chosen set (ties to the lowest index).
    """
    f = np.atleast_2d(np.asarray(f, dtype=np.float64))
    n = f.shape[0]
    if m >= n:
        return np.arange(n)
    chosen: list[int] = []
    for j in range(f.shape[1]):
        i = int(np.argmin(f[:, j]))
        if i not in chosen:
            chosen.append(i)
        if len(chosen) == m:
            return np.array(sorted(chosen), dtype=np.intp)
    min_dist = np.full(n, np.inf)
    for i in chosen:
        min_dist = np.minimum(min_dist, np.sqrt(((f - f[i]) ** 2).sum(axis=1)))
    while len(chosen) < m:
        min_dist[chosen] = -np.inf
        nxt = int(np.argmax(min_dist))
        chosen.append(nxt)
        min_dist = np.minimum(min_dist, np.sqrt(((f - f[nxt]) ** 2).sum(axis=1)))
    return np.array(sorted(chosen), dtype=np.intp)


@dataclass
class ArchivePoint:
    x: np.ndarray
    f: np.ndarray
    efficiency: float | None = None
    iteration: int | None = None


@dataclass
class ParetoArchive:
    """Accumulated efficient points; `filter()` keeps the non-dominated subset."""

    capacity: int | None = None
    points: list[ArchivePoint] = field(default_factory=list)
    _seen: set = field(default_factory=set, repr=False)

    def add(self, x, f, efficiency: float | None = None, iteration: int | None = None) -> bool:
        """Append one point; exact (x, f) duplicates of earlier entries are skipped."""
        x = np.asarray(x, dtype=np.float64)
        f = np.asarray(f, dtype=np.float64)
        key = (x.tobytes(), f.tobytes())
        if key in self._seen:
            return False
        self._seen.add(key)
        self.points.append(ArchivePoint(x=x.copy(), f=f.copy(), efficiency=efficiency, iteration=iteration))
        return True

    def objective_array(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 0))
        return np.array([p.f for p in self.points])

    def filter(self) -> None:
        """Drop dominated points (and thin to capacity by spread, if set)."""
        if not self.points:
            return
        keep = non_dominated_filter(self.objective_array())
        self.points = [self.points[i] for i in keep]
        if self.capacity is not None and len(self.points) > self.capacity:
            sub = farthest_point_subset(self.objective_array(), self.capacity)
            self.points = [self.points[i] for i in sub]
        # _seen is kept whole: a filtered-out point stays rejected, so a later
        # re-encounter cannot shadow the original "iteration found"

    def __len__(self) -> int:
        return len(self.points)
