import logging
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta

from polarmax.models.domain import Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.options import CONSTRAINED, TWO_PLATE, SolveOptions
from polarmax.models.results import Configuration
from polarmax.services.errors import SolverFailure, ValidationError
from polarmax.services.polarization_service import field_values, polarization_value
from polarmax.services.solver_service import (
    R_Ns,
    angular_gaps,
    best_simplex_radius,
    canonicalize_circle,
    circle_optimal_radius,
    circle_optimal_value,
    concentric_thresholds,
    interval_end_offset,
    interval_spacing,
    maximize_polarization,
    min_separation,
    regular_polygon,
    ring_derivative,
    ring_objective,
    simplex_configuration,
    softmin,
    softmin_weights,
    stay_away_check,
    threshold_residual,
    threshold_table,
    validate_ring_objective,
    warm_start,
    x_rs,
)


def _oracle(N, s, radii=2001, points=4096):
    """Brute force over the radius of a regular N-gon (rotation is irrelevant on the circle)."""
    phi = 2 * math.pi * np.arange(points) / points
    Y = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    kernel = KernelSpec.riesz(s)
    grid = np.linspace(0.0, 1.0, radii)
    values = [field_values(kernel, regular_polygon(N, r), Y).min() for r in grid]
    k = int(np.argmax(values))
    return float(values[k]), float(grid[k])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=30), st.floats(0.1, 1e4))
def test_softmin_brackets_the_hard_min(values, beta):
    F = np.array(values)
    m = float(F.min())
    S = softmin(F, beta)
    assert S <= m + 1e-9 * (1 + abs(m))
    assert S >= m - math.log(len(F)) / beta - 1e-9 * (1 + abs(m))
    assert softmin_weights(F, beta).sum() == pytest.approx(1.0)


def test_softmin_ignores_singular_entries():
    assert softmin(np.array([np.inf, 2.0]), 1e6) == pytest.approx(2.0)


def test_softmin_weights_of_an_all_singular_field_are_uniform():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        w = softmin_weights(np.full(4, np.inf), 10.0)
    np.testing.assert_array_equal(w, 0.25)
    np.testing.assert_allclose(softmin_weights(np.array([np.inf, 1.0, 1.0]), 10.0), [0.0, 0.5, 0.5])


@pytest.mark.parametrize("p, N, s", [(2, 2, 1.0), (3, 3, 2.0), (3, 2, 4.0), (3, 5, 1.0)])
def test_few_points_collapse_to_the_center(p, N, s, fast_opts):
    config, rep = maximize_polarization(KernelSpec.riesz(s), Domain.sphere(p), N, fast_opts)
    assert np.all(np.linalg.norm(config.points, axis=1) <= 1e-3)
    assert rep.value == pytest.approx(N, abs=1e-6)
    assert rep.method["warm_start"]


def test_circle_optimum_is_a_regular_polygon(circle):
    opts = SolveOptions(restarts=4, iterations=20, stages=8, seed=7)
    config, rep = maximize_polarization(KernelSpec.riesz(2), circle, 8, opts)
    value, radius = _oracle(8, 2.0)
    assert rep.value == pytest.approx(value, rel=1e-4)
    canon = canonicalize_circle(config)
    np.testing.assert_allclose(angular_gaps(canon), math.pi / 4, atol=1e-3)
    np.testing.assert_allclose(np.linalg.norm(config.points, axis=1), radius, atol=1e-3)


def test_solver_is_deterministic_across_thread_counts(circle):
    base = dict(restarts=4, iterations=10, stages=5, seed=3)
    one, rep_one = maximize_polarization(KernelSpec.riesz(1), Domain.cube(2), 5, SolveOptions(threads=1, **base))
    many, rep_many = maximize_polarization(KernelSpec.riesz(1), Domain.cube(2), 5, SolveOptions(threads=4, **base))
    np.testing.assert_array_equal(one.points, many.points)
    assert rep_one.value == rep_many.value


def test_constrained_solve_stays_on_the_set(circle):
    opts = SolveOptions(restarts=2, iterations=10, stages=5, mode=CONSTRAINED)
    config, rep = maximize_polarization(KernelSpec.ring(2.0, 1.0), circle, 5, opts)
    np.testing.assert_allclose(np.linalg.norm(config.points, axis=1), 1.0, atol=1e-12)
    assert np.isfinite(rep.value)


def test_constrained_circle_ratio_is_exact(circle):
    opts = SolveOptions(restarts=1, iterations=5, stages=3, mode=CONSTRAINED)
    _, rep = maximize_polarization(KernelSpec.riesz(2), circle, 16, opts)
    assert rep.value == pytest.approx(16 ** 2 / 4, rel=1e-9)


def test_two_plate_solution_lives_on_the_plate(circle):
    opts = SolveOptions(restarts=2, iterations=10, stages=5, mode=TWO_PLATE, plate=Domain.circle(0.5))
    config, _ = maximize_polarization(KernelSpec.riesz(0.5), circle, 4, opts)
    np.testing.assert_allclose(np.linalg.norm(config.points, axis=1), 0.5, atol=1e-12)


def test_geodesic_kernel_needs_constrained_circle(circle):
    with pytest.raises(ValidationError):
        maximize_polarization(KernelSpec.geodesic_riesz(1.0), circle, 3, SolveOptions(restarts=1))
    with pytest.raises(ValidationError):
        maximize_polarization(KernelSpec.geodesic_riesz(1.0), Domain.sphere(3), 3, SolveOptions(restarts=1, mode=CONSTRAINED))


def test_two_plate_needs_matching_dimensions(circle):
    with pytest.raises(ValidationError):
        maximize_polarization(KernelSpec.riesz(1), circle, 3, SolveOptions(restarts=1, mode=TWO_PLATE, plate=Domain.sphere(3)))


def test_all_singular_restarts_fail():
    single = Domain.cloud([[0.0, 0.0]])
    with pytest.raises(SolverFailure):
        maximize_polarization(KernelSpec.riesz(1), single, 1, SolveOptions(restarts=2, iterations=3, stages=2, mode=CONSTRAINED))


def test_invalid_options():
    with pytest.raises(ValueError):
        SolveOptions(restarts=0)
    with pytest.raises(ValueError):
        SolveOptions(mode=TWO_PLATE)
    with pytest.raises(ValueError):
        SolveOptions(beta0=10.0, beta_max=1.0)


def test_ring_objective_matches_brute_force_and_flags_the_printed_form(caplog):
    with caplog.at_level(logging.WARNING, logger="polarmax.services.solver_service"):
        errors = validate_ring_objective(7, 1.7)
    assert errors["geometric"] < 1e-8
    assert errors["printed"] > 1e-8
    assert "printed summand" in caplog.text


def test_circle_optimal_radius_is_a_critical_point():
    r = circle_optimal_radius(3, 1.0)
    assert 0.2 < r < 0.35
    assert abs(ring_derivative(r, 3, 1.0)) < 1e-8
    assert ring_objective(r, 3, 1.0) > ring_objective(0.0, 3, 1.0)


def test_circle_optimal_value_edge_cases():
    assert circle_optimal_value(1, 2.0) == 1.0
    assert circle_optimal_value(4, 2.0, r=0.0) == 4.0
    with pytest.raises(ValidationError):
        circle_optimal_radius(1, 2.0)
    with pytest.raises(ValidationError):
        circle_optimal_radius(4, 0.0)


@pytest.mark.parametrize("s", [1.0, 5.0])
def test_threshold_identities(s):
    for N in range(3, 101):
        R = R_Ns(N, s)
        assert abs(threshold_residual(R, s, math.cos(math.pi / N))) <= 1e-9
        th = concentric_thresholds(N, s)
        assert 1 / th.R_Ns < th.r_bar < th.R_Ns


def test_threshold_table_layout():
    rows, N0 = threshold_table(1.0, range(3, 11))
    assert [row[0] for row in rows] == list(range(3, 11))
    assert N0 == 3
    assert all(row[2] == pytest.approx(1 / row[3]) for row in rows)


@pytest.mark.parametrize("r, s", [(0.3, 1.0), (0.9, 5.0), (1.5, 2.0)])
def test_x_rs_solves_the_threshold_equation(r, s):
    assert threshold_residual(r, s, x_rs(r, s)) == pytest.approx(0.0, abs=1e-12)


def test_two_points_on_the_circle_have_no_band():
    th = concentric_thresholds(2, 1.0)
    assert th.r_bar == 0.0
    assert math.isinf(th.R_Ns)
    assert th.band_condition(0.5)


def test_simplex_configuration():
    config = simplex_configuration(3, 2.0, [1.0, 1.0, 1.0])
    d = config.points - 1.0
    np.testing.assert_allclose(np.linalg.norm(d, axis=1), 2.0)
    np.testing.assert_allclose(d.mean(axis=0), 0.0, atol=1e-12)
    assert min_separation(config) == pytest.approx(2.0 * math.sqrt(8 / 3))


def test_best_simplex_radius_is_in_the_unit_interval():
    r = best_simplex_radius(KernelSpec.riesz(2), 3, resolution=256)
    assert 0.0 <= r <= 1.0


def test_stay_away_distance(sphere3):
    config = Configuration(np.array([[0.5, 0.0, 0.0], [0.0, -0.8, 0.0]]))
    assert stay_away_check(config, sphere3) == pytest.approx(0.2)
    with pytest.raises(ValidationError):
        stay_away_check(config, Domain.ball(3))


def test_canonical_circle_form():
    config = Configuration(regular_polygon(5, 0.7, phase=1.3))
    canon = canonicalize_circle(config)
    assert math.atan2(canon.points[0, 1], canon.points[0, 0]) == pytest.approx(0.0, abs=1e-12)
    assert angular_gaps(canon).sum() == pytest.approx(2 * math.pi)
    np.testing.assert_allclose(np.linalg.norm(canon.points, axis=1), 0.7)


@pytest.mark.parametrize("s", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("N", [4, 8, 16])
def test_constrained_circle_optimum_is_equally_spaced(circle, s, N):
    opts = SolveOptions(restarts=2, iterations=10, stages=5, mode=CONSTRAINED)
    config, _ = maximize_polarization(KernelSpec.riesz(s), circle, N, opts)
    np.testing.assert_allclose(angular_gaps(canonicalize_circle(config)), 2 * math.pi / N, atol=1e-3)


def test_two_plate_solution_is_a_regular_polygon(circle):
    assert concentric_thresholds(8, 1.0).band_condition(0.8)
    opts = SolveOptions(restarts=2, iterations=10, stages=5, mode=TWO_PLATE, plate=Domain.circle(0.8))
    config, _ = maximize_polarization(KernelSpec.riesz(1), circle, 8, opts)
    np.testing.assert_allclose(angular_gaps(canonicalize_circle(config)), math.pi / 4, atol=1e-3)


@pytest.mark.parametrize(
    "domain, N, mode",
    [
        (Domain.circle(), 8, "unconstrained"),
        (Domain.sphere(3), 4, "unconstrained"),
        (Domain.sphere(3), 4, CONSTRAINED),
        (Domain.interval(0, 1), 6, "unconstrained"),
    ],
)
def test_result_is_at_least_the_warm_start(domain, N, mode):
    kernel = KernelSpec.riesz(2)
    opts = SolveOptions(restarts=2, iterations=10, stages=5, mode=mode)
    warm = warm_start(kernel, domain, N, opts)
    assert warm is not None
    _, rep = maximize_polarization(kernel, domain, N, opts)
    start = polarization_value(kernel, domain, warm, resolution=max(opts.resolution, 16 * N), mode=mode)
    assert rep.value >= start.value - 1e-12 * abs(start.value)


@pytest.mark.parametrize("N", [8, 16])
def test_solver_stays_away_from_the_circle_by_one_minus_r_bar(circle, N):
    config, _ = maximize_polarization(KernelSpec.riesz(2), circle, N, SolveOptions(restarts=2, iterations=10, stages=5))
    assert stay_away_check(config, circle) == pytest.approx(1 - circle_optimal_radius(N, 2.0), abs=1e-3)


@pytest.mark.parametrize("N", [32, 64])
def test_stay_away_distance_on_the_circle_decays_like_n_squared(N):
    # small-gap expansion of the ring objective at s = 2: 1 - r_bar ~ 3 h^2 / (2 pi^2), h = 2 pi / N
    assert N ** 2 * (1 - circle_optimal_radius(N, 2.0)) == pytest.approx(6.0, rel=0.15)


@pytest.mark.parametrize("s", [1.5, 2.0, 4.0])
def test_interval_end_offset_balances_the_end_gap(s):
    u = interval_end_offset(s)
    assert 0.0 < u < 0.5
    assert zeta(s, u) == pytest.approx(2 * zeta(s, 0.5), rel=1e-10)


def test_interval_end_offset_falls_back_to_midpoints():
    assert interval_end_offset(1.0) == 0.5


def test_interval_spacing_equalizes_the_segment_minima():
    A = Domain.interval(0, 1)
    kernel = KernelSpec.riesz(2)
    X = interval_spacing(kernel, A, 12)
    x = X.ravel()
    assert np.all(np.diff(x) > 0)
    assert 0.0 < x[0] < x[1] - x[0]
    assert x[0] == pytest.approx(1 - x[-1], rel=1e-9)
    edges = np.concatenate([[0.0], x, [1.0]])
    t = np.linspace(0.0, 1.0, 2001)[1:-1]
    mins = [field_values(kernel, X, (lo + t * (hi - lo))[:, None]).min() for lo, hi in zip(edges[:-1], edges[1:])]
    mins[0] = min(mins[0], field_values(kernel, X, np.array([[0.0]]))[0])
    mins[-1] = min(mins[-1], field_values(kernel, X, np.array([[1.0]]))[0])
    assert max(mins) / min(mins) == pytest.approx(1.0, abs=5e-3)
    uniform = (np.arange(12) + 0.5)[:, None] / 12
    assert polarization_value(kernel, A, X).value > polarization_value(kernel, A, uniform).value


def test_single_point_interval_start_is_the_midpoint():
    np.testing.assert_allclose(interval_spacing(KernelSpec.riesz(2), Domain.interval(2, 4), 1), [[3.0]])
