import numpy as np
import pytest

from coadea.engine import (
    CoaConfig,
    Habitat,
    InfeasibleProblemError,
    cluster_habitats,
    egg_laying_radius,
    init_population,
    lay_eggs,
    migrate,
    move_toward,
    run,
    select_survivors,
)
from coadea.problems import builtin, from_expressions, is_feasible

from oracles import pairwise_non_dominated


def _habitat(x, eff=None, efficient=False, f=None):
    x = np.asarray(x, dtype=float)
    return Habitat(x=x, objectives=np.asarray(f if f is not None else x, dtype=float),
                   efficiency=eff, efficient=efficient)


# --- egg laying radius ----------------------------------------------------


def test_radius_formula():
    cfg = CoaConfig(elr_alpha=1.0)
    assert egg_laying_radius(cfg, 3, 12, [0, 0], [10, 10]) == pytest.approx([2.5, 2.5])


def test_radius_full_share():
    cfg = CoaConfig(elr_alpha=1.0)
    assert egg_laying_radius(cfg, 5, 5, [0], [7]) == pytest.approx([7.0])


def test_radius_scaled_alpha_and_ranges():
    cfg = CoaConfig(elr_alpha=0.5)
    assert egg_laying_radius(cfg, 2, 8, [0, 0], [4, 8]) == pytest.approx([0.5, 1.0])


def test_radius_rejects_bad_counts():
    cfg = CoaConfig()
    with pytest.raises(ValueError):
        egg_laying_radius(cfg, 1, 0, [0], [1])
    with pytest.raises(ValueError):
        egg_laying_radius(cfg, 5, 3, [0], [1])


# --- initialization -------------------------------------------------------


def test_init_population_count_and_feasibility():
    problem = builtin(1)
    cfg = CoaConfig(initial_population=5)
    habitats = init_population(cfg, problem, np.random.default_rng(0))
    assert len(habitats) == 5
    for h in habitats:
        assert is_feasible(problem, h.x)[0]
        assert np.all(h.x >= problem.lower) and np.all(h.x <= problem.upper)


def test_init_population_degenerate_box():
    problem = from_expressions("pointbox", ["x1", "x2"], [], lower=[0, 0], upper=[0, 0])
    habitats = init_population(CoaConfig(initial_population=4), problem, np.random.default_rng(1))
    assert all(h.x == pytest.approx([0.0, 0.0]) for h in habitats)


def test_init_population_deterministic():
    problem = builtin(3)
    cfg = CoaConfig(initial_population=6, max_population=50)
    a = init_population(cfg, problem, np.random.default_rng(9))
    b = init_population(cfg, problem, np.random.default_rng(9))
    assert all(x.x.tobytes() == y.x.tobytes() for x, y in zip(a, b))


def test_init_population_infeasible_region_raises():
    problem = from_expressions("never", ["x1", "x2"], ["1 <= 0"], lower=[0, 0], upper=[1, 1])
    with pytest.raises(InfeasibleProblemError, match="never"):
        init_population(CoaConfig(), problem, np.random.default_rng(2))


# --- egg laying -----------------------------------------------------------


def test_zero_radius_collapses_to_single_egg():
    problem = builtin(1)
    parent = _habitat([1.0, 1.0], f=problem.objectives(np.array([1.0, 1.0])))
    eggs = lay_eggs(parent, np.zeros(2), 4, problem, np.random.default_rng(3))
    assert len(eggs) == 1
    assert eggs[0].x == pytest.approx([1.0, 1.0])


def test_eggs_respect_constraint():
    problem = builtin(1)
    parent = _habitat([5.0, 0.0], f=problem.objectives(np.array([5.0, 0.0])))
    eggs = lay_eggs(parent, np.array([0.1, 0.1]), 20, problem, np.random.default_rng(4))
    for egg in eggs:
        assert is_feasible(problem, egg.x)[0]


def test_eggs_near_boundary_filtered_but_bounded_count():
    problem = builtin(2)
    x = np.array([1.0, 0.0])  # on the cubic constraint boundary
    parent = _habitat(x, f=problem.objectives(x))
    eggs = lay_eggs(parent, np.array([0.5, 0.5]), 10, problem, np.random.default_rng(5))
    assert len(eggs) <= 10
    for egg in eggs:
        assert is_feasible(problem, egg.x)[0]


# --- clustering -----------------------------------------------------------


def test_cluster_well_separated_pairs():
    habitats = [
        _habitat([0.0, 0.0], eff=1.0), _habitat([0.1, 0.0], eff=0.9),
        _habitat([10.0, 10.0], eff=0.5), _habitat([10.1, 10.0], eff=0.4),
    ]
    assignments, means, goal = cluster_habitats(habitats, 2, np.random.default_rng(6))
    assert assignments[0] == assignments[1]
    assert assignments[2] == assignments[3]
    assert assignments[0] != assignments[2]
    assert goal == assignments[0]  # pair near the origin has the better mean score
    assert means[assignments[0]] == pytest.approx(0.95)


def test_cluster_k_one_and_k_above_count():
    habitats = [_habitat([i, 0.0], eff=0.5) for i in range(3)]
    assignments, means, goal = cluster_habitats(habitats, 1, np.random.default_rng(7))
    assert set(assignments.tolist()) == {0}
    assignments, means, goal = cluster_habitats(habitats, 10, np.random.default_rng(8))
    assert len(set(assignments.tolist())) == 3
    assert means.shape == (3,)


def test_cluster_requires_evaluation():
    with pytest.raises(ValueError, match="evaluated"):
        cluster_habitats([_habitat([0.0])], 1, np.random.default_rng(0))


# --- migration ------------------------------------------------------------


def test_move_toward_geometry():
    assert move_toward([0.0, 0.0], [2.0, 2.0], 0.5, [0, 0], [5, 5]) == pytest.approx([1.0, 1.0])
    assert move_toward([1.0, 1.0], [2.0, 2.0], 1.0, [0, 0], [5, 5]) == pytest.approx([2.0, 2.0])
    assert move_toward([1.0, 1.0], [1.0, 1.0], 1.7, [0, 0], [5, 5]) == pytest.approx([1.0, 1.0])


def test_migrate_goal_equals_position_is_noop():
    problem = builtin(1)
    x = np.array([1.0, 1.0])
    habitats = [_habitat(x, f=problem.objectives(x))]
    moved = migrate(habitats, x, CoaConfig(), problem, np.random.default_rng(11))
    assert moved[0].x == pytest.approx(x)


def test_migrate_keeps_feasibility():
    problem = builtin(2)
    rng = np.random.default_rng(12)
    habitats = init_population(CoaConfig(initial_population=10, max_population=50), problem, rng)
    goal = habitats[0].x
    moved = migrate(habitats, goal, CoaConfig(), problem, rng)
    for h in moved:
        assert is_feasible(problem, h.x)[0]
        assert np.all(h.x >= problem.lower) and np.all(h.x <= problem.upper)


def test_migrate_rejects_goal_outside_bounds():
    problem = builtin(1)
    with pytest.raises(ValueError, match="bounds"):
        migrate([_habitat([1.0, 1.0])], np.array([9.0, 9.0]), CoaConfig(), problem,
                np.random.default_rng(0))


# --- survivor selection ----------------------------------------------------


def test_select_survivors_ordering():
    habitats = [
        _habitat([0.0], eff=1.0, efficient=True, f=[0.0, 1.0]),
        _habitat([1.0], eff=0.5, efficient=False, f=[1.0, 1.0]),
        _habitat([2.0], eff=1.0, efficient=True, f=[2.0, 0.0]),
    ]
    survivors = select_survivors(habitats, 50)
    assert [s.efficiency for s in survivors] == [1.0, 1.0, 0.5]
    assert survivors[0].x == pytest.approx([0.0])  # insertion order among ties
    assert survivors[1].x == pytest.approx([2.0])


def test_select_survivors_cap():
    habitats = [_habitat([float(i)], eff=1.0, efficient=True, f=[float(i), float(60 - i)])
                for i in range(60)]
    survivors = select_survivors(habitats, 50)
    assert len(survivors) == 50
    xs = {float(s.x[0]) for s in survivors}
    assert 0.0 in xs and 59.0 in xs  # spread selection keeps the extremes


def test_select_survivors_singleton_and_empty():
    lone = _habitat([0.0], eff=0.3)
    assert select_survivors([lone], 50) == [lone]
    with pytest.raises(ValueError):
        select_survivors([], 50)


# --- config ----------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        CoaConfig(min_eggs=5, max_eggs=2).validate()
    with pytest.raises(ValueError):
        CoaConfig(initial_population=100, max_population=50).validate()
    with pytest.raises(ValueError):
        CoaConfig(num_clusters=0).validate()
    CoaConfig().validate()


# --- full runs --------------------------------------------------------------


@pytest.mark.parametrize("pid", [1, 2, 3, 4])
def test_run_frontier_nondominated_and_feasible(pid):
    problem = builtin(pid)
    result = run(problem, CoaConfig(), seed=41)
    assert len(result.frontier) > 0
    f = result.frontier_objectives()
    assert len(pairwise_non_dominated(f)) == f.shape[0]
    for p in result.frontier:
        feasible, violations = is_feasible(problem, p.x)
        assert feasible
        assert float(violations.max(initial=0.0)) <= 1e-9
        assert 1.0 - 1e-6 <= p.efficiency <= 1.0


def test_run_zero_iterations_returns_initial_efficient_points():
    problem = builtin(1)
    cfg = CoaConfig(max_iterations=0)
    result = run(problem, cfg, seed=7)
    rng = np.random.default_rng(7)
    initial = init_population(cfg, problem, rng)
    from coadea.dea import efficiency_scores

    report = efficiency_scores(np.array([h.objectives for h in initial]), 0.1, 1e-6)
    expected = np.array([h.objectives for h, e in zip(initial, report.efficient) if e])
    expected = expected[pairwise_non_dominated(expected)]
    got = result.frontier_objectives()
    assert sorted(map(tuple, got)) == sorted(map(tuple, expected))
    assert len(result.history) == 1


def test_run_deterministic_repeat():
    problem = builtin(2)
    a = run(problem, CoaConfig(), seed=5)
    b = run(problem, CoaConfig(), seed=5)
    assert a.frontier_objectives().tobytes() == b.frontier_objectives().tobytes()
    assert a.frontier_decisions().tobytes() == b.frontier_decisions().tobytes()
    assert a.history == b.history


def test_run_seed_falls_back_to_config():
    problem = builtin(1)
    a = run(problem, CoaConfig(seed=13))
    b = run(problem, CoaConfig(seed=13), seed=13)
    assert a.frontier_objectives().tobytes() == b.frontier_objectives().tobytes()


def test_run_population_cap_and_bounds_closure():
    problem = builtin(4)
    cfg = CoaConfig(max_iterations=6)
    result = run(problem, cfg, seed=3)
    for row in result.history:
        assert row.population_size <= cfg.max_population
    for p in result.frontier:
        assert np.all(p.x >= problem.lower) and np.all(p.x <= problem.upper)


def test_run_archive_hypervolume_monotone():
    problem = builtin(3)
    result = run(problem, CoaConfig(max_iterations=12), seed=21)
    hvs = [row.archive_hypervolume for row in result.history]
    assert all(b >= a - 1e-9 for a, b in zip(hvs, hvs[1:]))
    assert hvs[-1] > 0


def test_run_final_iteration_only_smaller_archive():
    problem = builtin(1)
    full = run(problem, CoaConfig(), seed=2)
    last_only = run(problem, CoaConfig(final_iteration_only=True), seed=2)
    assert last_only.history[-1].archive_size <= full.history[-1].archive_size
    f = last_only.frontier_objectives()
    assert len(pairwise_non_dominated(f)) == f.shape[0]
    # intermediate iterations archive nothing under the literal reading
    assert all(row.archive_size == 0 for row in last_only.history[:-1])


def test_run_history_iteration_indices():
    result = run(builtin(1), CoaConfig(max_iterations=4), seed=1)
    assert [row.iteration for row in result.history] == [0, 1, 2, 3, 4]
    assert all(row.pool_size >= row.population_size for row in result.history)
