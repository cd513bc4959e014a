import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from polarmax.models.domain import Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.options import CONSTRAINED, SolveOptions
from polarmax.services.domain_service import sample_set, sample_uniform_hull
from polarmax.services.errors import ValidationError
from polarmax.services.kernel_service import potential_matrix
from polarmax.services.polarization_service import (
    chebyshev_norm,
    covering_lower_bound,
    covering_radius,
    field_values,
    greedy_centers,
    local_descent,
    polarization_value,
    potential_profile,
)
from polarmax.services.solver_service import circle_optimal_radius, maximize_polarization, regular_polygon, ring_objective


def test_single_center_point(circle):
    rep = polarization_value(KernelSpec.riesz(2), circle, [[0.0, 0.0]])
    assert rep.value == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(rep.witness) == pytest.approx(1.0)


def test_regular_polygon_value_is_the_midpoint_potential(circle):
    r = circle_optimal_radius(8, 2.0)
    rep = polarization_value(KernelSpec.riesz(2), circle, regular_polygon(8, r))
    assert rep.value == pytest.approx(float(ring_objective(r, 8, 2.0)), rel=1e-10)
    angle = math.atan2(rep.witness[1], rep.witness[0]) % (math.pi / 4)
    assert angle == pytest.approx(math.pi / 8, abs=1e-6)


def test_value_is_recomputed_at_the_witness(sphere3):
    X = np.array([[0.1, 0.2, 0.0], [-0.3, 0.0, 0.4]])
    rep = polarization_value(KernelSpec.riesz(1), sphere3, X, resolution=300)
    assert rep.value == pytest.approx(potential_matrix(KernelSpec.riesz(1), X, rep.witness[None, :]).sum(), rel=1e-14)
    assert np.linalg.norm(rep.witness) == pytest.approx(1.0)


def test_polish_never_raises_the_sampled_minimum(sphere3):
    X = np.array([[0.3, -0.2, 0.1], [0.0, 0.5, -0.4], [-0.2, 0.0, 0.0]])
    raw = polarization_value(KernelSpec.riesz(2), sphere3, X, resolution=200, polish_steps=0)
    polished = polarization_value(KernelSpec.riesz(2), sphere3, X, resolution=200)
    assert polished.value <= raw.value + 1e-12


def test_field_values_in_blocks():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((3, 2))
    Y = rng.standard_normal((5000, 2)) + 10.0
    np.testing.assert_allclose(field_values(KernelSpec.riesz(1), X, Y), potential_matrix(KernelSpec.riesz(1), X, Y).sum(axis=0))


def test_local_descent_keeps_only_improvements(circle):
    def fun(y):
        return float(y[0])

    def grad(y):
        return np.array([1.0, 0.0])

    y0 = np.array([1.0, 0.0])
    y, fy = local_descent(fun, grad, circle, y0, step=0.1, steps=50)
    assert fy <= 1.0
    assert np.linalg.norm(y) == pytest.approx(1.0)


def test_potential_profile(circle):
    Y, F = potential_profile(KernelSpec.riesz(2), circle, [[0.0, 0.0]], resolution=32)
    assert Y.shape == (32, 2)
    np.testing.assert_allclose(F, 1.0)


def test_chebyshev_norm_of_the_roots_of_unity(circle):
    # max over the circle of |z^4 - 1|
    assert chebyshev_norm(regular_polygon(4), circle) == pytest.approx(2.0, rel=1e-9)


def test_dimension_mismatch(circle):
    with pytest.raises(ValidationError):
        polarization_value(KernelSpec.riesz(1), circle, [[0.0, 0.0, 0.0]])


@pytest.mark.parametrize("N", [4, 8])
def test_covering_radius_of_equally_spaced_points(circle, N):
    assert covering_radius(regular_polygon(N), circle) == pytest.approx(2 * math.sin(math.pi / (2 * N)), abs=1e-9)


def test_greedy_centers_are_distinct_sample_points():
    Y = np.linspace(0.0, 1.0, 101).reshape(-1, 1)
    C = greedy_centers(Y, 4)
    assert C.shape == (4, 1)
    assert len(np.unique(C)) == 4
    assert np.all(np.isin(C.ravel(), Y.ravel()))


def test_covering_bound_formula(circle):
    cert = covering_lower_bound(KernelSpec.riesz(2), circle, 6)
    assert cert.bound == pytest.approx((2 * cert.radius) ** -2)
    assert cert.centers.N == 6


def test_covering_bound_needs_positive_riesz(circle):
    with pytest.raises(ValidationError):
        covering_lower_bound(KernelSpec.inner_power(2), circle, 3)
    with pytest.raises(ValidationError):
        covering_lower_bound(KernelSpec.riesz(0), circle, 3)


@pytest.mark.parametrize(
    "domain, N, s",
    [
        (Domain.circle(), 4, 2.0),
        (Domain.circle(), 8, 1.0),
        (Domain.sphere(3), 4, 2.0),
        (Domain.interval(0, 1), 3, 2.0),
        (Domain.cube(2), 4, 1.0),
    ],
)
def test_covering_bound_below_the_solver_value(domain, N, s):
    opts = SolveOptions(restarts=2, iterations=15, stages=6)
    kernel = KernelSpec.riesz(s)
    _, rep = maximize_polarization(kernel, domain, N, opts)
    cert = covering_lower_bound(kernel, domain, N)
    assert cert.bound <= rep.value


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8), st.sampled_from([0.5, 1.0, 2.0]))
def test_adding_a_point_never_hurts(seed, N, s):
    A = Domain.circle()
    rng = np.random.default_rng(seed)
    X = sample_uniform_hull(A, N + 1, rng)
    kernel = KernelSpec.riesz(s)
    fewer = polarization_value(kernel, A, X[:N], polish_steps=0).value
    more = polarization_value(kernel, A, X, polish_steps=0).value
    assert more >= fewer
    assert covering_radius(X, A, polish_steps=0) <= covering_radius(X[:N], A, polish_steps=0)


@pytest.mark.parametrize("s", [0.5, 2.0])
def test_smaller_set_has_a_larger_minimum(s):
    circle = Domain.circle()
    arc = Domain.cloud(sample_set(circle, 512)[:128])
    kernel = KernelSpec.riesz(s)
    rng = np.random.default_rng(4)
    for _ in range(20):
        X = sample_uniform_hull(circle, 5, rng)
        assert polarization_value(kernel, arc, X).value >= polarization_value(kernel, circle, X, polish_steps=0).value


def _circle_energy(N, s):
    # equally spaced points minimize the Riesz energy on the circle
    return 2.0 * float(np.sum(pdist(regular_polygon(N)) ** -s))


@pytest.mark.parametrize("s", [1.0, 2.0])
@pytest.mark.parametrize("N", [4, 6, 8])
def test_unconstrained_constrained_and_energy_bounds_are_ordered(N, s):
    circle = Domain.circle()
    kernel = KernelSpec.riesz(s)
    fast = dict(restarts=2, iterations=10, stages=5)
    _, free = maximize_polarization(kernel, circle, N, SolveOptions(**fast))
    _, on_set = maximize_polarization(kernel, circle, N, SolveOptions(mode=CONSTRAINED, **fast))
    assert free.value >= on_set.value * (1 - 1e-9)
    assert on_set.value >= _circle_energy(N + 1, s) / (N + 1)
    assert _circle_energy(N + 1, s) / (N + 1) >= _circle_energy(N, s) / (N - 1)
