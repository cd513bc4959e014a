"""
Constructive devices as checkable algorithms: pi/6-separated replacement
points, the non-concentration census, and the simplex perturbation gain.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.special import betainc

from polarmax.models.domain import Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.results import Configuration, GainScan, ReplacementResult
from polarmax.services.domain_service import distances_to_set
from polarmax.services.errors import ValidationError
from polarmax.services.polarization_service import polarization_value
from polarmax.services.solver_service import simplex_configuration

logger = logging.getLogger(__name__)

SEPARATION = math.pi / 6.0
BUCKET_WIDTH = math.pi / 60.0
P3_CEILING = 40
ZERO_DISTANCE = 1e-12
ANGLE_SLACK = 1e-12


def separated_set_ceiling(p: int) -> int:
    """Ceiling on the size of a pi/6-separated direction set in S^{p-1}: 40 for p = 3, cap-volume bound otherwise."""
    if p == 1:
        return 2
    if p == 3:
        return P3_CEILING
    # normalized area of a cap of angular radius pi/12 on S^{p-1}
    cap = 0.5 * betainc((p - 1) / 2.0, 0.5, math.sin(SEPARATION / 2.0) ** 2)
    return int(math.floor(1.0 / cap + 1e-9))


def _rad_representatives(Y: np.ndarray, x: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """Indices keeping, per direction bucket of width pi/60, the sample point nearest to x (p = 2)."""
    d = Y - x
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * math.pi)
    bucket = np.floor(ang / BUCKET_WIDTH).astype(int)
    order = np.lexsort((np.arange(len(dist)), dist, bucket))
    first = np.ones(len(order), dtype=bool)
    first[1:] = bucket[order][1:] != bucket[order][:-1]
    return order[first]


def replacement_points(A_sample, x) -> ReplacementResult:
    """Greedy nearest-first selection of sample points whose directions from x are at least pi/6 apart."""
    Y = np.atleast_2d(np.asarray(A_sample, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    if Y.shape[1] != x.shape[0]:
        raise ValidationError("dimension mismatch between sample and x")
    p = x.shape[0]
    dist = np.linalg.norm(Y - x, axis=1)
    if dist.min() <= ZERO_DISTANCE:
        raise ValidationError("x lies on the sample (zero distance)")
    candidates = _rad_representatives(Y, x, dist) if p == 2 else np.arange(len(dist))
    candidates = candidates[np.lexsort((candidates, dist[candidates]))]
    cos_sep = math.cos(SEPARATION)
    chosen = []
    directions = []
    for j in candidates:
        u = (Y[j] - x) / dist[j]
        if all(float(u @ v) <= cos_sep + ANGLE_SLACK for v in directions):
            chosen.append(int(j))
            directions.append(u)
    R = Y[chosen]
    # dominance for f(r) = r^-2: every y has a replacement no farther than x
    nearest = np.min(np.linalg.norm(Y[:, None, :] - R[None, :, :], axis=-1), axis=1)
    violations = int(np.sum(nearest > dist * (1.0 + 1e-12)))
    bound = separated_set_ceiling(p)
    if violations:
        logger.warning("replacement: %d dominance violations on the sample", violations)
    if len(chosen) > bound:
        logger.warning("replacement: %d points exceed the separated-set ceiling %d", len(chosen), bound)
    return ReplacementResult(replacements=R, dominance_violations=violations, cap_bound=bound)


def non_concentration_census(config: Configuration, A: Domain, eps: float) -> int:
    """Number of configuration points farther than eps from A."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    return int(np.sum(distances_to_set(A, config.points) > eps))


def perturbed_cluster(cluster: np.ndarray, A: Domain, c2: float) -> np.ndarray:
    """Centroid + c2 * r * (regular simplex vertices), r = distance from the centroid to A."""
    p = cluster.shape[1]
    centroid = cluster.mean(axis=0)
    r = float(distances_to_set(A, centroid)[0])
    if r <= 0:
        raise ValidationError("cluster centroid lies on A (r = 0)")
    return simplex_configuration(p, c2 * r, centroid).points


def simplex_perturbation_gain(cluster, rest: Optional[Configuration], kernel: KernelSpec, A: Domain, c2: float,
                              resolution: int = 2048) -> float:
    """P(A, perturbed) - P(A, original); positive gain shows the cluster was not optimal."""
    C = np.atleast_2d(np.asarray(cluster.points if isinstance(cluster, Configuration) else cluster, dtype=float))
    p = C.shape[1]
    if C.shape[0] != p + 1:
        raise ValidationError(f"cluster must have exactly p + 1 = {p + 1} points")
    if c2 <= 0:
        raise ValidationError("c2 must be positive")
    others = rest.points if rest is not None else np.zeros((0, p))
    old = np.vstack([others, C])
    new = np.vstack([others, perturbed_cluster(C, A, c2)])
    before = polarization_value(kernel, A, old, resolution).value
    after = polarization_value(kernel, A, new, resolution).value
    return float(after - before)


def perturbation_gain_scan(cluster, rest: Optional[Configuration], kernel: KernelSpec, A: Domain,
                           c2_values: Sequence[float], resolution: int = 2048) -> GainScan:
    """Gains over c2 and the first contiguous run of c2 with positive gain."""
    c2s = [float(c) for c in c2_values]
    gains = [simplex_perturbation_gain(cluster, rest, kernel, A, c, resolution) for c in c2s]
    interval = None
    for i, g in enumerate(gains):
        if g > 0:
            j = i
            while j + 1 < len(gains) and gains[j + 1] > 0:
                j += 1
            interval = (c2s[i], c2s[j])
            break
    return GainScan(c2_values=c2s, gains=gains, positive_interval=interval)
