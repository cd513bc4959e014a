import math

import numpy as np
import pytest

from polarmax.models.domain import Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.options import SolveOptions
from polarmax.models.results import Configuration
from polarmax.services.errors import ValidationError
from polarmax.services.procedures_service import (
    non_concentration_census,
    perturbation_gain_scan,
    perturbed_cluster,
    replacement_points,
    separated_set_ceiling,
    simplex_perturbation_gain,
)
from polarmax.services.solver_service import maximize_polarization


def test_separated_set_ceiling():
    assert separated_set_ceiling(1) == 2
    assert separated_set_ceiling(2) == 12
    assert separated_set_ceiling(3) == 40


@pytest.mark.parametrize("seed", range(100))
def test_replacements_dominate_the_cloud(seed):
    rng = np.random.default_rng(seed)
    cloud = rng.random((50, 2))
    x = np.array([1.0 + rng.random(), rng.random()])
    result = replacement_points(cloud, x)
    assert result.dominance_violations == 0
    assert 1 <= result.n <= 12
    assert result.cap_bound == 12


def test_replacement_directions_are_separated():
    rng = np.random.default_rng(3)
    cloud = rng.normal(size=(200, 3))
    x = np.array([5.0, 0.0, 0.0])
    result = replacement_points(cloud, x)
    U = result.replacements - x
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    G = U @ U.T
    np.fill_diagonal(G, -1.0)
    assert G.max() < math.cos(math.pi / 6)
    assert result.dominance_violations == 0
    assert result.n <= 40


def test_nearest_point_is_always_kept():
    cloud = np.array([[2.0, 0.0], [3.0, 0.0], [2.0, 0.1]])
    result = replacement_points(cloud, [0.0, 0.0])
    np.testing.assert_array_equal(result.replacements[0], [2.0, 0.0])
    assert result.n == 1
    assert result.to_dict()["n"] == 1


def test_replacement_input_errors():
    with pytest.raises(ValidationError):
        replacement_points([[0.0, 0.0], [1.0, 1.0]], [0.0, 0.0])
    with pytest.raises(ValidationError):
        replacement_points([[0.0, 0.0]], [1.0, 1.0, 1.0])


def test_census_counts_points_off_the_set():
    config = Configuration(np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.9], [1.0, 0.0]]))
    assert non_concentration_census(config, Domain.circle(), 0.2) == 2
    assert non_concentration_census(config, Domain.circle(), 2.0) == 0
    with pytest.raises(ValidationError):
        non_concentration_census(config, Domain.circle(), 0.0)


@pytest.mark.slow
def test_solver_outputs_do_not_concentrate_off_the_circle():
    counts = []
    for N in (8, 16, 32, 64):
        config, _ = maximize_polarization(KernelSpec.riesz(2), Domain.circle(), N,
                                          SolveOptions(restarts=2, iterations=15, stages=6))
        counts.append(non_concentration_census(config, Domain.circle(), 0.2))
    assert max(counts) <= 1
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_perturbed_cluster_is_a_simplex_around_the_centroid():
    cluster = np.tile([0.5, 0.0], (3, 1))
    pts = perturbed_cluster(cluster, Domain.circle(), 0.2)
    assert pts.shape == (3, 2)
    np.testing.assert_allclose(pts.mean(axis=0), [0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(pts - [0.5, 0.0], axis=1), 0.1)


def test_spreading_a_planar_cluster_pays():
    cluster = np.tile([0.5, 0.0], (3, 1))
    scan = perturbation_gain_scan(cluster, None, KernelSpec.riesz(2.0), Domain.circle(), (0.05, 0.1, 0.2))
    assert scan.gains[0] > 0
    assert scan.positive_interval is not None
    assert scan.positive_interval[0] == 0.05
    assert len(scan.rows()) == 3


def test_harmonic_cluster_at_the_center_gains_nothing():
    cluster = np.zeros((4, 3))
    gain = simplex_perturbation_gain(cluster, None, KernelSpec.riesz(1.0), Domain.sphere(3), 0.3)
    assert gain <= 1e-9


def test_perturbation_keeps_the_rest_of_the_configuration():
    rest = Configuration(np.array([[-0.5, 0.0]]))
    cluster = np.tile([0.5, 0.0], (3, 1))
    gain = simplex_perturbation_gain(cluster, rest, KernelSpec.riesz(2.0), Domain.circle(), 0.1, resolution=512)
    assert np.isfinite(gain)


def test_perturbation_errors():
    kernel = KernelSpec.riesz(2.0)
    with pytest.raises(ValidationError):
        simplex_perturbation_gain(np.zeros((2, 2)), None, kernel, Domain.circle(), 0.1)
    with pytest.raises(ValidationError):
        simplex_perturbation_gain(np.zeros((3, 2)), None, kernel, Domain.circle(), 0.0)
    with pytest.raises(ValidationError):
        simplex_perturbation_gain(np.tile([1.0, 0.0], (3, 1)), None, kernel, Domain.circle(), 0.1)


def test_directions_exactly_thirty_degrees_apart_are_all_kept():
    angles = np.arange(12) * math.pi / 6
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    result = replacement_points(ring, [0.0, 0.0])
    assert result.n == 12
