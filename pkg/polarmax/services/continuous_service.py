"""
Continuous two-plate Chebyshev constant T_K(A, B) as a matrix game on samples,
solved by optimistic multiplicative weights with a running duality gap.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

from polarmax.models.domain import CUBE, INTERVAL, SPHERE, Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.results import ChebyshevResult, Configuration, DiscreteMeasure
from polarmax.services.domain_service import jitter_sample, sample_set
from polarmax.services.errors import ValidationError
from polarmax.services.kernel_service import potential_matrix
from polarmax.services.pool import parallel_map
from polarmax.services.solver_service import simplex_configuration

logger = logging.getLogger(__name__)

ETA = 0.25
COLLISION_TOL = 1e-12
ROW_BLOCK = 256


def payoff_matrix(kernel: KernelSpec, YA: np.ndarray, XB: np.ndarray, threads: Optional[int] = None) -> np.ndarray:
    """M[i, j] = K(y_i, x_j); row blocks are evaluated in parallel."""
    blocks = [YA[i:i + ROW_BLOCK] for i in range(0, YA.shape[0], ROW_BLOCK)]
    return np.vstack(parallel_map(lambda rows: potential_matrix(kernel, XB, rows).T, blocks, threads))


def _separate(kernel: KernelSpec, A: Domain, B: Domain, YA: np.ndarray, XB: np.ndarray, resB: int, seed: int) -> np.ndarray:
    if not kernel.singular:
        return XB
    hits = cdist(XB, YA).min(axis=1) <= COLLISION_TOL
    if not hits.any():
        return XB
    logger.info("A and B samples collide at %d atoms; offsetting B by half a mesh", int(hits.sum()))
    if B.shape in (SPHERE, INTERVAL, CUBE):
        XB = jitter_sample(B, resB, seed)
        hits = cdist(XB, YA).min(axis=1) <= COLLISION_TOL
    if hits.any():
        XB = XB[~hits]
    if XB.shape[0] == 0:
        raise ValidationError("B sample coincides with the A sample for a singular kernel")
    return XB


def chebyshev_constant(kernel: KernelSpec, A: Domain, B: Domain, resA: int = 400, resB: int = 400,
                       iterations: int = 20000, tol: Optional[float] = None, seed: int = 0,
                       threads: Optional[int] = None) -> ChebyshevResult:
    """max over measures mu on the B-sample of min over the A-sample of sum_j K(y, x_j) mu_j."""
    if A.p != B.p:
        raise ValidationError("A and B must live in the same R^p")
    YA = sample_set(A, resA)
    XB = _separate(kernel, A, B, YA, sample_set(B, resB), resB, seed)
    M = payoff_matrix(kernel, YA, XB, threads)
    if not np.all(np.isfinite(M)):
        raise ValidationError("kernel is unbounded on the sampled A x B")
    lo, hi = float(M.min()), float(M.max())
    span = hi - lo
    nB = XB.shape[0]
    if span == 0.0:
        measure = DiscreteMeasure(XB, np.full(nB, 1.0 / nB))
        return ChebyshevResult(value=lo, measure=measure, duality_gap=0.0, converged=True, upper=lo, iterations=0)
    if tol is None:
        tol = 1e-4 * max(span, abs(hi), abs(lo))
    Mn = (M - lo) / span

    # row player (A) minimizes, column player (B) maximizes
    LA = np.zeros(Mn.shape[0])
    LB = np.zeros(nB)
    prev_loss = np.zeros(Mn.shape[0])
    prev_gain = np.zeros(nB)
    sum_pA = np.zeros(Mn.shape[0])
    sum_q = np.zeros(nB)
    lower, upper = -np.inf, np.inf
    best_q = np.full(nB, 1.0 / nB)
    t = 0
    for t in range(1, iterations + 1):
        pA = softmax(LA)
        q = softmax(LB)
        sum_pA += pA
        sum_q += q
        loss = Mn @ q
        gain = pA @ Mn
        avg_q = sum_q / t
        avg_loss = Mn @ avg_q
        avg_gain = (sum_pA / t) @ Mn
        cur_low, avg_low = float(loss.min()), float(avg_loss.min())
        if cur_low > lower:
            lower, best_q = cur_low, q.copy()
        if avg_low > lower:
            lower, best_q = avg_low, avg_q.copy()
        upper = min(upper, float(gain.max()), float(avg_gain.max()))
        if (upper - lower) * span <= tol:
            break
        LA -= ETA * (2.0 * loss - prev_loss)
        LB += ETA * (2.0 * gain - prev_gain)
        LA -= LA.max()
        LB -= LB.max()
        prev_loss, prev_gain = loss, gain
    gap = max(upper - lower, 0.0) * span
    converged = gap <= tol
    if not converged:
        logger.warning("chebyshev: gap %.3g above tolerance %.3g after %d iterations", gap, tol, t)
    best_q = best_q / best_q.sum()
    return ChebyshevResult(
        value=lo + lower * span,
        measure=DiscreteMeasure(XB, best_q),
        duality_gap=gap,
        converged=converged,
        upper=lo + upper * span,
        iterations=t,
    )


def sphere_moment_constant(p: int, k: int) -> float:
    """Gamma(p/2) Gamma((k+1)/2) / (sqrt(pi) Gamma((p+k)/2)); for even k the ratio is prod_j (2j+1)/(p+2j)."""
    if p < 2:
        raise ValidationError("p must be >= 2")
    if k < 0 or k % 2:
        raise ValidationError("k must be an even nonnegative integer")
    return float(math.prod((2 * j + 1) / (p + 2 * j) for j in range(k // 2)))


def counting_measure(config: Configuration) -> DiscreteMeasure:
    """Uniform 1/N weights; coincident points merge by weight addition."""
    support, counts = np.unique(config.points, axis=0, return_counts=True)
    return DiscreteMeasure(support, counts / counts.sum())


def measure_potential(kernel: KernelSpec, Y: np.ndarray, measure: DiscreteMeasure) -> np.ndarray:
    """U(y) = sum_j K(x_j, y) mu_j at every y."""
    return potential_matrix(kernel, Y, measure.support) @ measure.weights


def circle_window_discrepancy(measure: DiscreteMeasure, windows: Sequence[float] = (0.25, 0.5, 1.0),
                              starts: int = 720, center: Optional[Sequence[float]] = None) -> float:
    """max over arcs of angular length w * pi and start angles of |mu(arc) - w/2|."""
    c = np.asarray(center, dtype=float) if center is not None else np.zeros(2)
    d = measure.support - c
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * np.pi)
    a0 = 2.0 * np.pi * np.arange(starts) / starts
    worst = 0.0
    for w in windows:
        length = w * np.pi
        rel = np.mod(ang[None, :] - a0[:, None], 2.0 * np.pi)
        mass = (rel < length).astype(float) @ measure.weights
        worst = max(worst, float(np.max(np.abs(mass - length / (2.0 * np.pi)))))
    return worst


def simplex_measure_value(p: int, resolution: int = 512) -> float:
    """min over a S^{p-1} sample of the <x,y>^2 potential of the regular-simplex counting measure."""
    measure = counting_measure(simplex_configuration(p))
    Y = sample_set(Domain.sphere(p), resolution)
    return float(measure_potential(KernelSpec.inner_power(2), Y, measure).min())


def potential_flatness(kernel: KernelSpec, A: Domain, measure: DiscreteMeasure, resolution: int) -> float:
    """max - min of the measure's potential over the A-sample."""
    U = measure_potential(kernel, sample_set(A, resolution), measure)
    return float(U.max() - U.min())
