"""
Max-min objective for fixed configurations: P_K(A, omega), covering radius,
and the covering-based lower-bound certificate.
The inner inf over A is a min over a deterministic sample, then a short local
descent from the lowest sample points. Reported values are hard minima.
"""
import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from polarmax.models.domain import CLOUD, SPHERE, Domain
from polarmax.models.kernel import RIESZ, KernelSpec
from polarmax.models.results import Configuration, CoveringCertificate, PolarizationReport
from polarmax.services.domain_service import diameter, mesh_size, project_to_set, sample_set
from polarmax.services.errors import ValidationError
from polarmax.services.kernel_service import gradient_matrix, potential_matrix

logger = logging.getLogger(__name__)

BLOCK = 4096
POLISH_CANDIDATES = 4
POLISH_STEPS = 25
REFINE_ROUNDS = 20


def _config_points(config, p: int) -> np.ndarray:
    X = config.points if isinstance(config, Configuration) else np.atleast_2d(np.asarray(config, dtype=float))
    if X.shape[1] != p:
        raise ValidationError(f"dimension mismatch: configuration in R^{X.shape[1]}, set in R^{p}")
    return X


def field_values(kernel: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """F(y_j) = sum_i K(x_i, y_j) for every sample point y_j."""
    out = np.empty(Y.shape[0])
    for start in range(0, Y.shape[0], BLOCK):
        out[start:start + BLOCK] = potential_matrix(kernel, X, Y[start:start + BLOCK]).sum(axis=0)
    return out


def field_gradient(kernel: KernelSpec, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """dF/dy at a single point y."""
    return gradient_matrix(kernel, y[None, :], X)[0].sum(axis=0)


def _polishable(A: Domain) -> bool:
    return A.shape != CLOUD and not (A.shape == SPHERE and A.p == 1)


def local_descent(fun: Callable[[np.ndarray], float], grad: Callable[[np.ndarray], np.ndarray], A: Domain,
                  y0: np.ndarray, step: float, steps: int = POLISH_STEPS) -> Tuple[np.ndarray, float]:
    """Projected normalized-gradient descent on A with backtracking; only improvements are kept."""
    y, fy = y0, fun(y0)
    floor = 1e-14 * max(diameter(A), 1.0)
    t = step
    for _ in range(steps):
        if not np.isfinite(fy):
            break
        g = grad(y)
        gn = float(np.linalg.norm(g))
        if gn == 0.0 or not np.isfinite(gn):
            break
        moved = False
        while t > floor:
            cand = project_to_set(A, y - t * g / gn)
            fc = fun(cand)
            if fc < fy:
                y, fy, moved = cand, fc, True
                t *= 1.5
                break
            t *= 0.5
        if not moved:
            break
    return y, fy


def polished_min(kernel: KernelSpec, A: Domain, X: np.ndarray, Y: np.ndarray, F: np.ndarray,
                 resolution: int, steps: int = POLISH_STEPS) -> Tuple[np.ndarray, float]:
    """Witness and value of min_A F: discrete argmin, then local descent from the lowest candidates."""
    order = np.argsort(F, kind="stable")
    if steps <= 0 or not _polishable(A):
        j = int(order[0])
        return Y[j].copy(), float(F[j])

    def fun(y):
        return float(potential_matrix(kernel, X, y[None, :]).sum())

    def grad(y):
        return field_gradient(kernel, X, y)

    step = 0.5 * mesh_size(A, resolution)
    best_y, best_v = Y[int(order[0])].copy(), float(F[int(order[0])])
    for j in order[:POLISH_CANDIDATES]:
        y, v = local_descent(fun, grad, A, Y[int(j)].copy(), step, steps)
        if v < best_v:
            best_y, best_v = y, v
    # value is recomputed at the witness, never carried from the sample
    return best_y, fun(best_y)


def polarization_value(kernel: KernelSpec, A: Domain, config, resolution: int = 512, seed: int = 0,
                       mode: str = "unconstrained", polish_steps: int = POLISH_STEPS,
                       sample: Optional[np.ndarray] = None) -> PolarizationReport:
    """P_K(A, omega) = min over A of y -> sum_i K(x_i, y), with the witness."""
    X = _config_points(config, A.p)
    Y = sample if sample is not None else sample_set(A, resolution, seed)
    F = field_values(kernel, X, Y)
    witness, value = polished_min(kernel, A, X, Y, F, resolution, polish_steps)
    if not np.isfinite(value):
        logger.info("polarization value is singular (%s) for %s on %s", value, kernel.label(), A.label())
    return PolarizationReport(
        value=value,
        witness=witness,
        resolution=int(Y.shape[0]),
        kernel=kernel,
        mode=mode,
        method={"sample": "deterministic", "seed": seed, "polish_steps": polish_steps},
    )


def potential_profile(kernel: KernelSpec, A: Domain, config, resolution: int = 512) -> Tuple[np.ndarray, np.ndarray]:
    """(sample, potentials) rows for plotting the field over A."""
    X = _config_points(config, A.p)
    Y = sample_set(A, resolution)
    return Y, field_values(kernel, X, Y)


def chebyshev_norm(config, A: Domain, resolution: int = 512) -> float:
    """max over A of prod_j |z - z_j| = exp(-P_0(A, omega))."""
    return float(np.exp(-polarization_value(KernelSpec.riesz(0.0), A, config, resolution).value))


def covering_on_sample(X: np.ndarray, A: Domain, Y: np.ndarray, resolution: int, steps: int) -> Tuple[float, np.ndarray]:
    D = cdist(Y, X).min(axis=1)
    order = np.argsort(-D, kind="stable")
    best_j = int(order[0])
    if steps <= 0 or not _polishable(A):
        return float(D[best_j]), Y[best_j].copy()

    def fun(y):
        return -float(np.linalg.norm(X - y, axis=1).min())

    def grad(y):
        d = np.linalg.norm(X - y, axis=1)
        i = int(np.argmin(d))
        return -(y - X[i]) / d[i] if d[i] > 0 else np.zeros_like(y)

    step = 0.5 * mesh_size(A, resolution)
    best_y, best_v = Y[best_j].copy(), -float(D[best_j])
    for j in order[:POLISH_CANDIDATES]:
        y, v = local_descent(fun, grad, A, Y[int(j)].copy(), step, steps)
        if v < best_v:
            best_y, best_v = y, v
    return -best_v, best_y


def covering_radius(config, A: Domain, resolution: int = 512, seed: int = 0, polish_steps: int = POLISH_STEPS) -> float:
    """eta(omega, A) = max over A of the distance to the nearest configuration point."""
    X = _config_points(config, A.p)
    eta, _ = covering_on_sample(X, A, sample_set(A, resolution, seed), resolution, polish_steps)
    return eta


def greedy_centers(Y: np.ndarray, N: int) -> np.ndarray:
    """Farthest-point traversal from sample index 0, then minimax-medoid refinement of each cell."""
    idx = [0]
    dmin = np.linalg.norm(Y - Y[0], axis=1)
    for _ in range(N - 1):
        j = int(np.argmax(dmin))
        idx.append(j)
        dmin = np.minimum(dmin, np.linalg.norm(Y - Y[j], axis=1))
    centers = np.array(idx)
    for _ in range(REFINE_ROUNDS):
        labels = np.argmin(cdist(Y, Y[centers]), axis=1)
        updated = centers.copy()
        for c in range(len(centers)):
            members = np.flatnonzero(labels == c)
            if members.size == 0:
                continue
            spread = cdist(Y[members], Y[members]).max(axis=1)
            updated[c] = members[int(np.argmin(spread))]
        if np.array_equal(updated, centers):
            break
        centers = updated
    return Y[centers].copy()


def covering_lower_bound(kernel: KernelSpec, A: Domain, N: int, resolution: int = 512) -> CoveringCertificate:
    """Greedy N-ball cover of the A-sample; (2r)^-s lower-bounds P_s*(A, N) up to sampling error."""
    if kernel.kind != RIESZ or kernel.s <= 0:
        raise ValidationError("covering lower bound needs a Riesz kernel with s > 0")
    if N < 1:
        raise ValidationError("N must be >= 1")
    Y = sample_set(A, max(resolution, N))
    centers = greedy_centers(Y, N)
    r = covering_radius(centers, A, resolution)
    with np.errstate(divide="ignore"):
        bound = float((2.0 * r) ** (-kernel.s))
    logger.info("covering certificate: N=%d r=%.6g bound=%.6g", N, r, bound)
    return CoveringCertificate(radius=r, bound=bound, centers=Configuration(centers))
