"""
Best covering: closed forms on S^1, the constrained -> unconstrained sphere
transfer, and a smoothed minimax descent for general sets.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp, softmax
from scipy.spatial.distance import cdist

from polarmax.models.domain import INTERVAL, SPHERE, Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.options import CONSTRAINED, TWO_PLATE, UNCONSTRAINED, SolveOptions
from polarmax.models.results import Configuration, CoverReport, TransferResult
from polarmax.services.domain_service import (
    diameter,
    project_hull_many,
    project_set_many,
    sample_set,
    sample_uniform_hull,
    sample_uniform_set,
)
from polarmax.services.errors import ValidationError
from polarmax.services.polarization_service import covering_on_sample, covering_radius, greedy_centers
from polarmax.services.pool import parallel_map
from polarmax.services.solver_service import (
    circle_optimal_value,
    maximize_polarization,
    regular_polygon,
    simplex_configuration,
)

logger = logging.getLogger(__name__)

BRIDGE_S = 64.0


def circle_unconstrained_cover(N: int) -> CoverReport:
    """N <= 2: all points at the origin, eta = 1. N >= 3: side midpoints of the regular N-gon, eta = sin(pi/N)."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    if N <= 2:
        return CoverReport(eta=1.0, config=Configuration(np.zeros((N, 2))), mode=UNCONSTRAINED)
    pts = regular_polygon(N, np.cos(np.pi / N), phase=np.pi / N)
    return CoverReport(eta=float(np.sin(np.pi / N)), config=Configuration(pts), mode=UNCONSTRAINED)


def circle_constrained_cover(N: int) -> CoverReport:
    """Equally spaced points on S^1, eta = 2 sin(pi / 2N)."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    eta = 2.0 if N == 1 else float(2.0 * np.sin(np.pi / (2 * N)))
    return CoverReport(eta=eta, config=Configuration(regular_polygon(N)), mode=CONSTRAINED)


def sphere_transfer(eta: float, config: Configuration) -> TransferResult:
    """Solve eta^2 = (1 - sqrt(1 - rho^2))^2 + rho^2 for rho; scale the sphere configuration by r_N = sqrt(1 - rho^2)."""
    if not 0.0 < eta < np.sqrt(2.0):
        raise ValidationError("constrained covering radius must lie in (0, sqrt(2))")
    p = config.p
    if config.N < p + 1:
        raise ValidationError(f"transfer needs N >= p + 1 = {p + 1}; fewer points collapse to the origin")
    target = eta * eta
    rho = brentq(lambda r: 2.0 - 2.0 * np.sqrt(1.0 - r * r) - target, 0.0, min(eta, 1.0), xtol=1e-14)
    r_N = float(np.sqrt(1.0 - rho * rho))
    return TransferResult(r_N=r_N, eta_star=float(rho), config=Configuration(r_N * config.points))


def _warm_cover(A: Domain, N: int, mode: str, Y: np.ndarray) -> np.ndarray:
    p = A.p
    c = A.center_array
    if A.is_circle:
        base = circle_unconstrained_cover(N) if mode == UNCONSTRAINED else circle_constrained_cover(N)
        return c + A.radius * base.config.points
    if A.shape == SPHERE:
        if mode == UNCONSTRAINED and N <= p:
            return np.repeat(c[None, :], N, axis=0)
        if N == p + 1:
            simplex = simplex_configuration(p)
            if mode == CONSTRAINED:
                return c + A.radius * simplex.points
            eta = covering_radius(simplex, Domain.sphere(p))
            return c + A.radius * sphere_transfer(eta, simplex).config.points
    if A.shape == INTERVAL:
        lo, hi = A.bounds()
        return (lo + (np.arange(N) + 0.5) * (hi - lo) / N).reshape(-1, 1)
    return greedy_centers(Y, N)


def _descend(X0: np.ndarray, Y: np.ndarray, project, opts: SolveOptions, diam: float) -> np.ndarray:
    """Annealed softmax descent on max_j min_i |y_j - x_i|; returns the iterate with the smallest sampled max."""
    X = project(X0)

    def dists(Xc):
        D = cdist(Y, Xc)
        nearest = np.argmin(D, axis=1)
        return D[np.arange(Y.shape[0]), nearest], nearest

    d, nearest = dists(X)
    best_X, best_max = X.copy(), float(d.max())
    floor = 1e-12 * diam
    t = opts.step * diam
    for beta in opts.betas():
        scale = max(float(d.max()), 1e-300)
        S = float(scale / beta * logsumexp(beta * d / scale))
        for _ in range(opts.iterations):
            w = softmax(beta * d / scale)
            safe = np.where(d > 0, d, 1.0)
            contrib = (w / safe)[:, None] * (X[nearest] - Y)
            G = np.zeros_like(X)
            np.add.at(G, nearest, contrib)
            gmax = float(np.max(np.linalg.norm(G, axis=1)))
            if gmax == 0.0:
                break
            accepted = False
            while t > floor:
                Xc = project(X - t * G / gmax)
                dc, nc = dists(Xc)
                Sc = float(scale / beta * logsumexp(beta * dc / scale))
                if Sc < S:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
            drop = S - Sc
            X, d, nearest, S = Xc, dc, nc, Sc
            t *= 1.25
            if d.max() < best_max * (1.0 - 1e-12):
                best_X, best_max = X.copy(), float(d.max())
            if drop <= opts.tol * S:
                break
        t = max(t, 1e-3 * diam)
    return best_X


def minimize_covering(A: Domain, N: int, opts: Optional[SolveOptions] = None) -> CoverReport:
    """Smallest covering radius found over restarts (restart 0 is a closed-form or greedy start)."""
    opts = opts or SolveOptions()
    if N < 1:
        raise ValidationError("N must be >= 1")
    if opts.mode == TWO_PLATE:
        raise ValidationError("covering supports constrained and unconstrained modes")
    resolution = max(opts.resolution, 16 * N)
    Y = sample_set(A, resolution)
    diam = max(diameter(A), 1e-12)
    if opts.mode == UNCONSTRAINED:
        def project(X):
            return project_hull_many(A, X)

        def draw(rng):
            return sample_uniform_hull(A, N, rng)
    else:
        def project(X):
            return project_set_many(A, X)

        def draw(rng):
            return sample_uniform_set(A, N, rng)

    warm = _warm_cover(A, N, opts.mode, Y)
    streams = np.random.SeedSequence(opts.seed).spawn(opts.restarts)

    def run(i: int) -> Tuple[np.ndarray, float]:
        X0 = project(warm if i == 0 else draw(np.random.default_rng(streams[i])))
        X = _descend(X0, Y, project, opts, diam)
        best = None
        for cand in (X0, X):
            eta, _ = covering_on_sample(cand, A, Y, resolution, opts.polish_steps)
            if best is None or eta < best[1]:
                best = (cand, eta)
        logger.debug("cover restart %d: eta=%.12g", i, best[1])
        return best

    results = parallel_map(run, range(opts.restarts), opts.threads)
    i_best = min(range(len(results)), key=lambda i: (results[i][1], i))
    X, eta = results[i_best]
    logger.info("cover %s N=%d mode=%s: eta=%.12g (restart %d)", A.label(), N, opts.mode, eta, i_best)
    return CoverReport(eta=eta, config=Configuration(X), mode=opts.mode)


def covering_via_polarization(A: Domain, N: int, opts: Optional[SolveOptions] = None, s: float = BRIDGE_S) -> CoverReport:
    """Covering from the large-s Riesz polarization optimum (cross-check path)."""
    opts = opts or SolveOptions()
    config, _ = maximize_polarization(KernelSpec.riesz(s), A, N, opts)
    eta = covering_radius(config, A, max(opts.resolution, 16 * N))
    return CoverReport(eta=eta, config=config, mode=opts.mode)


def riesz_covering_bridge(N: int, ss: Sequence[float]) -> List[float]:
    """(P_s*(S^1, N))^(-1/s) for each s, from the regular N-gon at its optimal radius."""
    if N < 3:
        raise ValidationError("the ring closed form needs N >= 3")
    return [float(circle_optimal_value(N, float(s)) ** (-1.0 / s)) for s in ss]
