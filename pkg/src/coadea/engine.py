"""Cuckoo-search population loop scored by CCR efficiency.

Each iteration pools the current habitats with their freshly laid eggs,
scores the whole pool with the DEA efficiency model, archives every habitat
that scores 1, keeps the best survivors, clusters them, and migrates the
population toward the best habitat of the best cluster. The final frontier
is the archive after an efficiency certification over the whole accumulated
set and a dominance filter.

Constraint handling is a death penalty: infeasible eggs are discarded and
infeasible migrations fall back to the pre-move position, so every habitat
is feasible at all times.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from coadea.dea import efficiency_scores
from coadea.pareto import ParetoArchive, farthest_point_subset, hypervolume_2d, non_dominated_filter
from coadea.problems import ProblemSpec, is_feasible

_INIT_REJECTION_LIMIT = 10_000
_EGG_DUP_TOL = 1e-9


class InfeasibleProblemError(RuntimeError):
    """Rejection sampling could not find a feasible point."""


@dataclass
class Habitat:
    """A candidate solution: position, cached objectives, cached efficiency."""

    x: np.ndarray
    objectives: np.ndarray
    efficiency: float | None = None
    efficient: bool = False


@dataclass(frozen=True)
class CoaConfig:
    initial_population: int = 5
    min_eggs: int = 2
    max_eggs: int = 6
    max_iterations: int = 8
    num_clusters: int = 2
    max_population: int = 50
    elr_alpha: float = 1.0
    motion_coefficient: float = 2.0
    epsilon_shift: float = 0.1
    eff_tol: float = 1e-6
    seed: int = 0
    final_iteration_only: bool = False

    def validate(self) -> None:
        for name in ("initial_population", "min_eggs", "max_eggs", "num_clusters", "max_population"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be nonnegative, got {self.max_iterations}")
        if self.min_eggs > self.max_eggs:
            raise ValueError(f"min_eggs={self.min_eggs} exceeds max_eggs={self.max_eggs}")
        if self.initial_population > self.max_population:
            raise ValueError("initial_population exceeds max_population")
        if self.elr_alpha <= 0 or self.motion_coefficient <= 0:
            raise ValueError("elr_alpha and motion_coefficient must be positive")


@dataclass
class CuckooState:
    """Loop state: current habitats, iteration counter, archive, generator."""

    habitats: list[Habitat]
    iteration: int
    archive: ParetoArchive
    rng: np.random.Generator


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    pool_size: int
    population_size: int
    efficient_count: int
    best_efficiency: float
    mean_efficiency: float
    archive_size: int
    archive_hypervolume: float = 0.0


@dataclass(frozen=True)
class FrontierPoint:
    x: np.ndarray
    objectives: np.ndarray
    efficiency: float
    iteration: int


@dataclass(frozen=True)
class RunResult:
    frontier: list[FrontierPoint]
    history: list[IterationStats]

    def frontier_objectives(self) -> np.ndarray:
        return np.array([p.objectives for p in self.frontier])

    def frontier_decisions(self) -> np.ndarray:
        return np.array([p.x for p in self.frontier])


def _make_habitat(problem: ProblemSpec, x: np.ndarray) -> Habitat:
    return Habitat(x=x, objectives=np.asarray(problem.objectives(x), dtype=np.float64))


def init_population(cfg: CoaConfig, problem: ProblemSpec, rng: np.random.Generator) -> list[Habitat]:
    """Uniform rejection sampling of feasible habitats within the bounds."""
    habitats: list[Habitat] = []
    rejections = 0
    while len(habitats) < cfg.initial_population:
        x = rng.uniform(problem.lower, problem.upper)
        ok, _ = is_feasible(problem, x)
        if ok:
            habitats.append(_make_habitat(problem, x))
            rejections = 0
        else:
            rejections += 1
            if rejections >= _INIT_REJECTION_LIMIT:
                raise InfeasibleProblemError(
                    f"feasible region not found for problem {problem.name!r} "
                    f"after {_INIT_REJECTION_LIMIT} consecutive rejections"
                )
    return habitats


def egg_laying_radius(cfg: CoaConfig, eggs_i: int, total_eggs: int, lower, upper) -> np.ndarray:
    """Per-dimension radius: alpha * (own eggs / total eggs) * variable range."""
    if total_eggs < 1:
        raise ValueError("total_eggs must be positive")
    if not 1 <= eggs_i <= total_eggs:
        raise ValueError(f"eggs_i={eggs_i} outside [1, total_eggs={total_eggs}]")
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    return cfg.elr_alpha * (eggs_i / total_eggs) * (upper - lower)


def lay_eggs(
    habitat: Habitat,
    radius: np.ndarray,
    num_eggs: int,
    problem: ProblemSpec,
    rng: np.random.Generator,
) -> list[Habitat]:
    """Uniform box perturbations of the parent, clipped to bounds.

    Infeasible eggs are killed; surviving duplicates (within 1e-9 per
    coordinate) collapse to one. May legitimately return an empty list.
    """
    if num_eggs < 1:
        raise ValueError("num_eggs must be at least 1")
    offsets = rng.uniform(-1.0, 1.0, size=(num_eggs, problem.n_var)) * radius
    positions = np.clip(habitat.x + offsets, problem.lower, problem.upper)
    eggs: list[Habitat] = []
    for x in positions:
        ok, _ = is_feasible(problem, x)
        if not ok:
            continue
        if any(np.max(np.abs(x - e.x)) <= _EGG_DUP_TOL for e in eggs):
            continue
        eggs.append(_make_habitat(problem, x))
    return eggs


def cluster_habitats(
    habitats: list[Habitat],
    k: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, int]:
    """k-means in decision space (centroids seeded from the habitats, at most
    100 Lloyd rounds).

    Returns (assignments, per-cluster mean efficiency, goal cluster index);
    the goal cluster maximizes mean efficiency, ties to the lowest index.
    """
    n = len(habitats)
    if n < 1:
        raise ValueError("cannot cluster an empty population")
    if k < 1:
        raise ValueError("k must be at least 1")
    if any(h.efficiency is None for h in habitats):
        raise ValueError("all habitats must be evaluated before clustering")
    points = np.array([h.x for h in habitats])
    k_eff = min(k, n)
    centroids = points[rng.choice(n, size=k_eff, replace=False)].copy()
    assignments = np.full(n, -1, dtype=np.intp)
    for _ in range(100):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignments = np.argmin(d2, axis=1)
        for c in range(k_eff):
            members = points[new_assignments == c]
            if members.shape[0] == 0:
                centroids[c] = points[rng.integers(n)]
            else:
                centroids[c] = members.mean(axis=0)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
    scores = np.array([h.efficiency for h in habitats])
    mean_eff = np.array([
        scores[assignments == c].mean() if np.any(assignments == c) else -np.inf
        for c in range(k_eff)
    ])
    return assignments, mean_eff, int(np.argmax(mean_eff))


def migrate(
    habitats: list[Habitat],
    goal_point: np.ndarray,
    cfg: CoaConfig,
    problem: ProblemSpec,
    rng: np.random.Generator,
) -> list[Habitat]:
    """Move every habitat to x + lambda (goal - x), lambda ~ U[0, motion_coefficient].

    Destinations are clipped to the bounds; infeasible destinations fall back
    to the original (feasible) position. Moved habitats get fresh objectives
    and cleared efficiency caches.
    """
    goal_point = np.asarray(goal_point, dtype=np.float64)
    if np.any(goal_point < problem.lower) or np.any(goal_point > problem.upper):
        raise ValueError("goal point must lie within the bounds")
    lams = rng.uniform(0.0, cfg.motion_coefficient, size=len(habitats))
    moved: list[Habitat] = []
    for h, lam in zip(habitats, lams):
        x = move_toward(h.x, goal_point, float(lam), problem.lower, problem.upper)
        ok, _ = is_feasible(problem, x)
        if ok and not np.array_equal(x, h.x):
            moved.append(_make_habitat(problem, x))
        else:
            moved.append(Habitat(x=h.x, objectives=h.objectives, efficiency=None))
    return moved


def move_toward(x, goal, lam: float, lower, upper) -> np.ndarray:
    """The migration geometry in isolation: x + lam (goal - x), clipped to bounds."""
    x = np.asarray(x, dtype=np.float64)
    goal = np.asarray(goal, dtype=np.float64)
    return np.clip(x + lam * (goal - x), lower, upper)


def select_survivors(habitats: list[Habitat], max_population: int) -> list[Habitat]:
    """Stable sort by efficiency descending, truncated to max_population.

    All efficiency-1 habitats come first. If they alone exceed the cap, the
    kept subset maximizes objective-space spread (greedy farthest-point).
    """
    if not habitats:
        raise ValueError("cannot select survivors from an empty population")
    if any(h.efficiency is None for h in habitats):
        raise ValueError("all habitats must be evaluated before selection")
    order = sorted(range(len(habitats)), key=lambda i: -habitats[i].efficiency)
    efficient_idx = [i for i in order if habitats[i].efficient]
    if len(efficient_idx) > max_population:
        f = np.array([habitats[i].objectives for i in efficient_idx])
        keep = farthest_point_subset(f, max_population)
        chosen = sorted(efficient_idx[j] for j in keep)
        return [habitats[i] for i in chosen]
    return [habitats[i] for i in order[:max_population]]


def run(problem: ProblemSpec, cfg: CoaConfig, seed: int | None = None) -> RunResult:
    """Execute the full loop and return the frontier plus per-iteration history.

    Deterministic: a fixed (seed, config, problem) triple reproduces the
    result exactly. `seed=None` falls back to cfg.seed.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    state = CuckooState(
        habitats=init_population(cfg, problem, rng),
        iteration=0,
        archive=ParetoArchive(),
        rng=rng,
    )
    history: list[IterationStats] = []
    snapshots: list[np.ndarray] = []

    # iteration 0 scores the freshly initialized population; it feeds the
    # archive only when the loop body never runs
    _score_pool(state.habitats, cfg)
    _archive_and_record(
        state, pool=state.habitats, survivors=state.habitats,
        history=history, snapshots=snapshots,
        archive_now=cfg.max_iterations == 0,
    )

    for iteration in range(1, cfg.max_iterations + 1):
        state.iteration = iteration
        counts = rng.integers(cfg.min_eggs, cfg.max_eggs + 1, size=len(state.habitats))
        total = int(counts.sum())
        pool = list(state.habitats)
        for habitat, count in zip(state.habitats, counts):
            radius = egg_laying_radius(cfg, int(count), total, problem.lower, problem.upper)
            pool.extend(lay_eggs(habitat, radius, int(count), problem, rng))

        _score_pool(pool, cfg)
        survivors = select_survivors(pool, cfg.max_population)
        _archive_and_record(
            state, pool=pool, survivors=survivors,
            history=history, snapshots=snapshots,
            archive_now=(not cfg.final_iteration_only) or iteration == cfg.max_iterations,
        )

        assignments, _, goal_cluster = cluster_habitats(survivors, cfg.num_clusters, rng)
        goal = _goal_habitat(survivors, assignments, goal_cluster)
        state.habitats = migrate(survivors, goal.x, cfg, problem, rng)

    state.archive.filter()
    frontier = _certified_frontier(state.archive, cfg)
    history = _attach_hypervolumes(history, snapshots)
    return RunResult(frontier=frontier, history=history)


def _certified_frontier(archive: ParetoArchive, cfg: CoaConfig) -> list[FrontierPoint]:
    """Efficiency-certify the accumulated archive, then dominance-filter.

    Points were archived for scoring 1 within their own iteration's pool; a
    crude early pool can certify points that the full archive's hull later
    reveals as inefficient. Re-scoring the whole archive as one unit set
    keeps exactly the convex-frontier points the efficiency model can vouch
    for; the dominance filter then drops the weakly-efficient leftovers.
    """
    report = efficiency_scores(archive.objective_array(), cfg.epsilon_shift, cfg.eff_tol)
    certified = [
        (point, float(score))
        for point, score, ok in zip(archive.points, report.score, report.efficient)
        if ok
    ]
    keep = non_dominated_filter(np.array([p.f for p, _ in certified]))
    frontier = [
        FrontierPoint(
            x=certified[i][0].x,
            objectives=certified[i][0].f,
            efficiency=certified[i][1],
            iteration=int(certified[i][0].iteration),
        )
        for i in keep
    ]
    frontier.sort(key=lambda p: (tuple(p.objectives), tuple(p.x)))
    return frontier


def _score_pool(habitats: list[Habitat], cfg: CoaConfig) -> None:
    f = np.array([h.objectives for h in habitats])
    report = efficiency_scores(f, cfg.epsilon_shift, cfg.eff_tol)
    for h, s, e in zip(habitats, report.score, report.efficient):
        h.efficiency = float(s)
        h.efficient = bool(e)


def _archive_and_record(
    state: CuckooState,
    pool: list[Habitat],
    survivors: list[Habitat],
    history: list[IterationStats],
    snapshots: list[np.ndarray],
    archive_now: bool,
) -> None:
    efficient = [h for h in pool if h.efficient]
    if archive_now:
        for h in efficient:
            state.archive.add(h.x, h.objectives, efficiency=h.efficiency, iteration=state.iteration)
        state.archive.filter()
    scores = np.array([h.efficiency for h in pool])
    history.append(IterationStats(
        iteration=state.iteration,
        pool_size=len(pool),
        population_size=len(survivors),
        efficient_count=len(efficient),
        best_efficiency=float(scores.max()),
        mean_efficiency=float(scores.mean()),
        archive_size=len(state.archive),
    ))
    snap = state.archive.objective_array()
    snapshots.append(snap.copy() if snap.size else snap)


def _goal_habitat(survivors: list[Habitat], assignments: np.ndarray, goal_cluster: int) -> Habitat:
    best: Habitat | None = None
    for h, c in zip(survivors, assignments):
        if c == goal_cluster and (best is None or h.efficiency > best.efficiency):
            best = h
    if best is None:  # cluster emptied by a degenerate k-means round
        best = max(survivors, key=lambda h: h.efficiency)
    return best


def _attach_hypervolumes(history: list[IterationStats], snapshots: list[np.ndarray]) -> list[IterationStats]:
    """Hypervolume of each iteration's filtered archive against one fixed
    reference point: the componentwise max of everything archived during the
    run plus a 10% margin. Only defined for two objectives; otherwise 0."""
    stacked = [s for s in snapshots if s.size]
    if not stacked or stacked[0].shape[1] != 2:
        return history
    allpts = np.vstack(stacked)
    span = allpts.max(axis=0) - allpts.min(axis=0)
    ref = allpts.max(axis=0) + 0.1 * np.where(span > 0, span, 1.0)
    return [
        replace(row, archive_hypervolume=float(hypervolume_2d(s, ref)) if s.size else 0.0)
        for row, s in zip(history, snapshots)
    ]
