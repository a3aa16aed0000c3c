import math

import numpy as np
import pytest

from coadea.dea import efficiency_scores, shift_to_positive
from coadea.pareto import (
    ParetoArchive,
    dominates,
    farthest_point_subset,
    generational_distance,
    hypervolume_2d,
    non_dominated_filter,
    reference_front,
    spacing,
)
from coadea.problems import builtin, from_expressions, is_feasible

from oracles import (
    convex_hull,
    hull_boundary_distance,
    monte_carlo_hypervolume,
    pairwise_non_dominated,
    strictly_inside_hull,
)


# --- dominance -----------------------------------------------------------


def test_dominates_basics():
    assert dominates((1, 2), (2, 3))
    assert not dominates((1, 2), (1, 2))
    assert not dominates((1, 3), (2, 2))
    assert not dominates((2, 2), (1, 3))


def test_dominates_rejects_length_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


def test_dominance_antisymmetry_and_transitivity():
    rng = np.random.default_rng(41)
    for _ in range(500):
        a, b, c = rng.integers(0, 4, size=(3, 3)).astype(float)
        assert not (dominates(a, b) and dominates(b, a))
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)


# --- filtering -----------------------------------------------------------


def test_filter_worked_set():
    idx = non_dominated_filter([(1, 4), (2, 2), (4, 1), (3, 3)])
    assert list(idx) == [0, 1, 2]


def test_filter_single_point_and_duplicates():
    assert list(non_dominated_filter([(5, 5)])) == [0]
    assert list(non_dominated_filter([(1, 1), (1, 1)])) == [0, 1]


def test_filter_rejects_empty():
    with pytest.raises(ValueError):
        non_dominated_filter(np.empty((0, 2)))


def test_filter_idempotent():
    rng = np.random.default_rng(3)
    points = rng.normal(size=(60, 2))
    once = points[non_dominated_filter(points)]
    twice = once[non_dominated_filter(once)]
    assert np.array_equal(once, twice)


def test_sweep_equals_pairwise_oracle():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(1, 120))
        # integer grids force plenty of ties and duplicates
        points = rng.integers(0, 8, size=(n, 2)).astype(float)
        assert np.array_equal(non_dominated_filter(points), pairwise_non_dominated(points))


def test_filter_three_objectives_matches_oracle():
    rng = np.random.default_rng(14)
    for _ in range(30):
        points = rng.integers(0, 5, size=(40, 3)).astype(float)
        assert np.array_equal(non_dominated_filter(points), pairwise_non_dominated(points))


# --- reference fronts ----------------------------------------------------


def test_reference_front_p1_feasible_and_nonempty():
    problem = builtin(1)
    front = reference_front(problem, 60)
    assert front.shape[0] > 0
    assert np.array_equal(non_dominated_filter(front), np.arange(front.shape[0]))


def test_reference_front_refinement():
    # every coarse-front member is nearly weakly dominated by a fine-front member
    problem = builtin(1)
    coarse = reference_front(problem, 10)
    fine = reference_front(problem, 200)
    tol = 0.02 * (fine.max(axis=0) - fine.min(axis=0))
    for p in coarse:
        assert np.any(np.all(fine <= p + tol, axis=1)), p


def test_reference_front_rejects_infeasible_problem():
    impossible = from_expressions(
        "impossible", ["x1", "x2"], ["1 <= 0"], lower=[0, 0], upper=[1, 1]
    )
    with pytest.raises(ValueError, match="no feasible grid point"):
        reference_front(impossible, 12)


def test_reference_front_guards():
    problem = builtin(1)
    with pytest.raises(ValueError):
        reference_front(problem, 9)


# --- metrics -------------------------------------------------------------


def test_generational_distance_cases():
    ref = [(0.0, 0.0), (1.0, 1.0)]
    assert generational_distance([(0, 0)], ref) == 0.0
    assert generational_distance([(0, 0)], [(3, 4)]) == pytest.approx(5.0)
    assert generational_distance([(0, 0), (1, 1)], [(0, 0)]) == pytest.approx(math.sqrt(2) / 2)
    with pytest.raises(ValueError):
        generational_distance([], ref)
    with pytest.raises(ValueError):
        generational_distance(ref, [])


def test_hypervolume_rectangle_union():
    # two overlapping rectangles: 2 + 2 - 1
    assert hypervolume_2d([(1, 2), (2, 1)], (3, 3)) == pytest.approx(3.0)


def test_hypervolume_unit_square_and_empty():
    assert hypervolume_2d([(0, 0)], (1, 1)) == pytest.approx(1.0)
    assert hypervolume_2d([], (5, 5)) == 0.0
    # members beyond the reference point are excluded, not errors
    assert hypervolume_2d([(2, 2)], (1, 1)) == 0.0


def test_hypervolume_handles_dominated_members():
    front = [(1, 2), (2, 1), (2.5, 2.5), (1, 2)]
    assert hypervolume_2d(front, (3, 3)) == pytest.approx(3.0)


def test_hypervolume_monotone_under_new_nondominated_point():
    rng = np.random.default_rng(10)
    for _ in range(50):
        front = rng.uniform(0.0, 1.0, size=(6, 2))
        ref = np.array([1.2, 1.2])
        base = hypervolume_2d(front, ref)
        extra = rng.uniform(0.0, 1.0, size=2)
        assert hypervolume_2d(np.vstack([front, extra]), ref) >= base - 1e-12


def test_hypervolume_matches_monte_carlo():
    rng = np.random.default_rng(77)
    for _ in range(5):
        front = rng.uniform(0.0, 1.0, size=(int(rng.integers(2, 10)), 2))
        ref = np.array([1.1, 1.1])
        exact = hypervolume_2d(front, ref)
        estimate = monte_carlo_hypervolume(front, ref, 200_000, rng)
        assert exact == pytest.approx(estimate, rel=0.02)


def test_spacing_cases():
    assert spacing([(0, 0), (1, 1), (2, 2)]) == pytest.approx(0.0)
    assert spacing([(5, 5)]) == 0.0
    # nearest-neighbor distances {1, 1, 2}: population std sqrt(2)/3
    assert spacing([(0, 0), (1, 0), (3, 0)]) == pytest.approx(math.sqrt(2) / 3)


def test_farthest_point_subset_keeps_extremes():
    f = np.array([[0, 10], [1, 8], [5, 5], [8, 1], [10, 0]], dtype=float)
    sub = farthest_point_subset(f, 3)
    assert 0 in sub and 4 in sub
    assert len(sub) == 3


# --- archive -------------------------------------------------------------


def test_archive_dedupe_and_filter():
    archive = ParetoArchive()
    assert archive.add([0.0], [1.0, 4.0], iteration=1)
    assert not archive.add([0.0], [1.0, 4.0], iteration=2)  # exact duplicate skipped
    archive.add([1.0], [2.0, 2.0], iteration=1)
    archive.add([2.0], [3.0, 3.0], iteration=1)
    archive.filter()
    assert [tuple(p.f) for p in archive.points] == [(1.0, 4.0), (2.0, 2.0)]
    assert archive.points[0].iteration == 1


def test_archive_capacity_thinning():
    archive = ParetoArchive(capacity=2)
    for i in range(5):
        archive.add([float(i)], [float(i), float(4 - i)])
    archive.filter()
    assert len(archive) == 2
    kept = {tuple(p.f) for p in archive.points}
    assert (0.0, 4.0) in kept and (4.0, 0.0) in kept  # extremes survive


# --- bridge between efficiency and dominance -----------------------------


def test_dea_dominance_bridge():
    """Efficient + non-dominated points sit on the hull's lower-left boundary;
    dominated points strictly inside the hull score below 1."""
    rng = np.random.default_rng(2718)
    for _ in range(15):
        points = rng.uniform(0.2, 9.0, size=(int(rng.integers(4, 14)), 2))
        shifted = shift_to_positive(points, 0.1).shifted_points
        report = efficiency_scores(points, 0.1, 1e-6)
        nondom = set(non_dominated_filter(points).tolist())
        hull = convex_hull(shifted)
        scale = float(np.max(np.abs(shifted)))
        for i in range(points.shape[0]):
            on_boundary = hull_boundary_distance(hull, shifted[i]) <= 1e-9 * scale
            if report.score[i] == 1.0 and i in nondom:
                assert on_boundary
            if i not in nondom and not on_boundary:
                assert report.score[i] < 1.0
