"""
Max-min solver: annealed softmin ascent with projection (onto conv(A), A or B),
parallel seeded restarts, closed-form warm starts; plus the closed-form circle
and simplex constructions.
"""
import logging
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import helmert
from scipy.optimize import brentq, minimize_scalar
from scipy.spatial.distance import pdist
from scipy.special import logsumexp, softmax, zeta

from polarmax.models.domain import BALL, INTERVAL, SPHERE, Domain
from polarmax.models.kernel import GEODESIC, RIESZ, KernelSpec
from polarmax.models.options import CONSTRAINED, TWO_PLATE, UNCONSTRAINED, SolveOptions
from polarmax.models.results import CircleThresholds, Configuration, PolarizationReport
from polarmax.services.domain_service import (
    diameter,
    project_hull_many,
    project_set_many,
    sample_set,
    sample_uniform_hull,
    sample_uniform_set,
)
from polarmax.services.errors import SolverFailure, ValidationError
from polarmax.services.kernel_service import gradient_matrix
from polarmax.services.polarization_service import field_values, polarization_value
from polarmax.services.pool import parallel_map

logger = logging.getLogger(__name__)

RADIUS_GRID = 2001
WEIGHT_FLOOR = 1e-16


# ---- softmin surrogate ----

def _scale(F: np.ndarray) -> float:
    finite = F[np.isfinite(F)]
    if finite.size == 0:
        return 1.0
    m = abs(float(finite.min()))
    if m > 1e-12:
        return m
    spread = float(np.ptp(finite))
    return spread if spread > 0 else 1.0


def softmin(F: np.ndarray, beta: float, scale: float = 1.0) -> float:
    """-(scale/beta) log sum_j exp(-beta F_j / scale); +inf entries drop out."""
    return float(-(scale / beta) * logsumexp(-beta * F / scale))


def softmin_weights(F: np.ndarray, beta: float, scale: float = 1.0) -> np.ndarray:
    """softmax(-beta F / scale); uniform when every entry is +inf."""
    low = np.min(F)
    if not np.isfinite(low):
        return np.full(F.shape, 1.0 / F.size)
    return softmax(-beta * (F - low) / scale)


def _surrogate_gradient(kernel: KernelSpec, X: np.ndarray, Y: np.ndarray, F: np.ndarray,
                        beta: float, scale: float) -> np.ndarray:
    w = softmin_weights(F, beta, scale)
    active = w > WEIGHT_FLOOR * w.max()
    G = gradient_matrix(kernel, X, Y[active])
    return np.einsum("j,ijp->ip", w[active], G)


def _ascend(kernel: KernelSpec, X0: np.ndarray, Y: np.ndarray, project: Callable, opts: SolveOptions,
            diam: float) -> np.ndarray:
    """One restart of annealed softmin ascent; returns the iterate with the best sampled hard min."""
    X = project(X0)
    F = field_values(kernel, X, Y)
    best_X, best_min = X.copy(), float(F.min())
    floor = 1e-12 * diam
    t = opts.step * diam
    for beta in opts.betas():
        scale = _scale(F)
        S = softmin(F, beta, scale)
        for _ in range(opts.iterations):
            G = _surrogate_gradient(kernel, X, Y, F, beta, scale)
            gmax = float(np.max(np.linalg.norm(G, axis=1)))
            if gmax == 0.0 or not np.isfinite(gmax):
                break
            D = G / gmax
            accepted = False
            while t > floor:
                Xc = project(X + t * D)
                Fc = field_values(kernel, Xc, Y)
                Sc = softmin(Fc, beta, scale)
                if Sc > S:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
            gain = Sc - S
            X, F, S = Xc, Fc, Sc
            t *= 1.25
            current = float(F.min())
            if current > best_min + 1e-12 * abs(best_min):
                best_X, best_min = X.copy(), current
            if gain <= opts.tol * max(abs(S), 1e-300):
                break
        t = max(t, 1e-3 * diam)
    return best_X


# ---- closed forms on the circle ----

def _ring_cosines(N: int) -> np.ndarray:
    return np.cos((2 * np.arange(N) + 1) * np.pi / N)


def ring_objective(r, N: int, s: float):
    """Potential of the regular N-gon of radius r at the unit-circle point midway between two vertices."""
    r = np.asarray(r, dtype=float)
    c = _ring_cosines(N)
    base = r[..., None] ** 2 + 1.0 - 2.0 * r[..., None] * c
    return np.sum(base ** (-s / 2.0), axis=-1)


def ring_objective_printed(r, N: int, s: float):
    """The same objective with the cosine term unscaled by r; compared against geometry only."""
    r = np.asarray(r, dtype=float)
    c = np.cos((2 * np.arange(N) + 1) * np.pi / (2 * N))
    base = r[..., None] ** 2 + 1.0 - 2.0 * c
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.sum(base ** (-s / 2.0), axis=-1)


def ring_derivative(r: float, N: int, s: float) -> float:
    c = _ring_cosines(N)
    base = r * r + 1.0 - 2.0 * r * c
    return float(-s * np.sum((r - c) * base ** (-s / 2.0 - 1.0)))


def regular_polygon(N: int, radius: float = 1.0, phase: float = 0.0, center: Optional[Sequence[float]] = None) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(N) / N + phase
    pts = radius * np.stack([np.cos(t), np.sin(t)], axis=1)
    return pts + (np.asarray(center, dtype=float) if center is not None else 0.0)


def _polygon_min(N: int, s: float, r: float, points: int = 2049) -> float:
    phi = np.linspace(0.0, np.pi / N, points)
    Y = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    return float(field_values(KernelSpec.riesz(s), regular_polygon(N, r), Y).min())


@lru_cache(maxsize=None)
def validate_ring_objective(N: int, s: float, r: float = 0.5) -> dict:
    """Relative errors of the geometric and printed ring objectives against a brute-force min over S^1."""
    brute = _polygon_min(N, s, r, points=4097)
    geometric = float(ring_objective(r, N, s))
    printed = float(ring_objective_printed(r, N, s))
    err_geo = abs(geometric - brute) / abs(brute)
    err_printed = abs(printed - brute) / abs(brute) if np.isfinite(printed) else float("inf")
    if err_printed > 1e-8:
        logger.warning("ring objective: printed summand disagrees with geometry for N=%d s=%g (rel err %.3g); using the geometric chord",
                       N, s, err_printed)
    if err_geo > 1e-8:
        logger.warning("ring objective: geometric summand off by %.3g for N=%d s=%g", err_geo, N, s)
    return {"brute": brute, "geometric": err_geo, "printed": err_printed}


@lru_cache(maxsize=None)
def circle_optimal_radius(N: int, s: float) -> float:
    """r_bar_{N,s}: maximizer over [0, 1] of the ring objective (grid scan, then a root of its derivative)."""
    if N < 2:
        raise ValidationError("circle optimal radius needs N >= 2")
    if s <= 0:
        raise ValidationError("circle optimal radius needs s > 0")
    validate_ring_objective(N, float(s))
    grid = np.linspace(0.0, 1.0, RADIUS_GRID)
    vals = ring_objective(grid, N, s)
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, RADIUS_GRID - 1)]
    if ring_derivative(lo, N, s) > 0 > ring_derivative(hi, N, s):
        return float(brentq(ring_derivative, lo, hi, args=(N, s), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    res = minimize_scalar(lambda r: -float(ring_objective(r, N, s)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x) if -res.fun >= vals[k] else float(grid[k])


def circle_optimal_value(N: int, s: float, r: Optional[float] = None) -> float:
    """Hard-min value on S^1 of the regular N-gon at radius r (default r_bar_{N,s})."""
    if r is None:
        r = circle_optimal_radius(N, s) if N >= 2 else 0.0
    if N == 1 or r == 0.0:
        return float(N)
    return _polygon_min(N, s, r)


def x_rs(r: float, s: float) -> float:
    """x_{r,s}; tends to 0 as r -> 0."""
    if r == 0:
        return 0.0
    a = 1.0 + r * r
    return float((-a + np.sqrt(a * a + 4.0 * r * r * s * (2.0 + s))) / (2.0 * r * s))


def R_Ns(N: int, s: float) -> float:
    """Larger root in r of threshold_residual(r, s, cos(pi/N)) = 0."""
    c, sn2 = np.cos(np.pi / N), np.sin(np.pi / N) ** 2
    return float(0.5 / c * (s * sn2 + 2.0 + np.sqrt(sn2 * ((s + 2.0) ** 2 - s * s * c * c))))


def threshold_residual(r: float, s: float, x: float) -> float:
    """g(r, s, x) = 2(1 + r^2) x + r(-4 + 2s(x^2 - 1))."""
    return float(2.0 * (1.0 + r * r) * x + r * (-4.0 + 2.0 * s * (x * x - 1.0)))


def concentric_thresholds(N: int, s: float) -> CircleThresholds:
    if N < 2:
        raise ValidationError("thresholds need N >= 2")
    if s <= 0:
        raise ValidationError("thresholds need s > 0")
    if N == 2:
        # cos(pi/2) = 0: the band is unbounded and the optimum collapses to the origin
        return CircleThresholds(N=N, s=float(s), r_bar=0.0, R_Ns=float("inf"), x_of_r=lambda r: x_rs(r, s))
    return CircleThresholds(N=N, s=float(s), r_bar=circle_optimal_radius(N, float(s)), R_Ns=R_Ns(N, s),
                            x_of_r=lambda r: x_rs(r, s))


def threshold_table(s: float, Ns: Sequence[int]) -> Tuple[List[list], Optional[int]]:
    """Rows (N, r_bar, 1/R, R) and the smallest N0 with R^-1 < r_bar < R for every tabulated N >= N0."""
    rows = []
    ok = []
    for N in Ns:
        th = concentric_thresholds(int(N), s)
        rows.append([int(N), th.r_bar, 1.0 / th.R_Ns, th.R_Ns])
        ok.append(1.0 / th.R_Ns < th.r_bar < th.R_Ns)
    N0 = None
    for i in range(len(ok) - 1, -1, -1):
        if not ok[i]:
            break
        N0 = rows[i][0]
    return rows, N0


# ---- closed forms on an interval ----

def interval_end_offset(s: float) -> float:
    """Endpoint offset u, in spacings, whose one-sided lattice sum zeta(s, u) matches an interior gap midpoint."""
    if s <= 1:
        return 0.5
    target = 2.0 * float(zeta(s, 0.5))
    return float(brentq(lambda u: float(zeta(s, u)) - target, 1e-9, 0.5, xtol=1e-14))


def interval_spacing(kernel: KernelSpec, A: Domain, N: int, sweeps: int = 80, points: int = 32) -> np.ndarray:
    """Equally spaced points with endpoint offsets, then segment widths rescaled until every gap and both
    end segments carry the same minimum potential."""
    lo, hi = A.bounds()
    a, L = float(lo[0]), float(hi[0] - lo[0])
    if N == 1:
        return np.array([[a + 0.5 * L]])
    s = kernel.s if kernel.kind == RIESZ else 0.0
    w = np.ones(N + 1)
    w[0] = w[-1] = interval_end_offset(s)
    w *= L / w.sum()
    if kernel.kind != RIESZ or s <= 0:
        return (a + np.cumsum(w[:-1]))[:, None]
    t = (np.arange(points) + 0.5) / points
    rate = 0.5 / max(s, 1.0)
    ends = np.array([[a], [a + L]])
    for _ in range(sweeps):
        x = a + np.cumsum(w[:-1])
        left = np.concatenate([[a], x])
        Y = (left[:, None] + t * w[:, None]).reshape(-1, 1)
        m = field_values(kernel, x[:, None], Y).reshape(N + 1, points).min(axis=1)
        m[[0, -1]] = np.minimum(m[[0, -1]], field_values(kernel, x[:, None], ends))
        ratio = m / np.exp(np.mean(np.log(m)))
        if np.max(np.abs(ratio - 1.0)) < 1e-9:
            break
        w *= ratio ** rate
        w *= L / w.sum()
    return (a + np.cumsum(w[:-1]))[:, None]


# ---- simplex, diagnostics ----

def simplex_configuration(p: int, radius: float = 1.0, center: Optional[Sequence[float]] = None) -> Configuration:
    """p+1 vertices of a regular simplex inscribed in the sphere of given radius about center."""
    if p < 1:
        raise ValidationError("simplex needs p >= 1")
    V = helmert(p + 1).T * np.sqrt((p + 1.0) / p)
    c = np.asarray(center, dtype=float) if center is not None else np.zeros(p)
    return Configuration(c + radius * V)


def best_simplex_radius(kernel: KernelSpec, p: int, resolution: int = 512) -> float:
    """Radius in [0, 1] maximizing the sampled min-potential of a concentric regular simplex on S^{p-1}."""
    Y = sample_set(Domain.sphere(p), resolution)

    def neg(r):
        return -float(field_values(kernel, simplex_configuration(p, r).points, Y).min())

    res = minimize_scalar(neg, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    return float(res.x) if res.fun < neg(0.0) else 0.0


def stay_away_check(config: Configuration, A: Domain) -> float:
    """min_i of the distance from x_i to the sphere surface."""
    if A.shape != SPHERE:
        raise ValidationError("stay-away check needs a sphere")
    X = config.points
    return float(np.min(np.abs(np.linalg.norm(X - A.center_array, axis=1) - A.radius)))


def canonicalize_circle(config: Configuration, center: Optional[Sequence[float]] = None) -> Configuration:
    """Sort by angle and rotate the first point to angle 0."""
    c = np.asarray(center, dtype=float) if center is not None else np.zeros(2)
    d = config.points - c
    radii = np.linalg.norm(d, axis=1)
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * np.pi)
    order = np.argsort(ang, kind="stable")
    ang = ang[order] - ang[order][0]
    radii = radii[order]
    return Configuration(c + radii[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1))


def angular_gaps(config: Configuration, center: Optional[Sequence[float]] = None) -> np.ndarray:
    c = np.asarray(center, dtype=float) if center is not None else np.zeros(2)
    d = config.points - c
    ang = np.sort(np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * np.pi))
    return np.diff(np.append(ang, ang[0] + 2.0 * np.pi))


def min_separation(config: Configuration) -> float:
    if config.N < 2:
        return float("inf")
    return float(pdist(config.points).min())


# ---- solver ----

def _is_round(A: Domain) -> bool:
    return A.shape in (SPHERE, BALL)


def warm_start(kernel: KernelSpec, A: Domain, N: int, opts: SolveOptions) -> Optional[np.ndarray]:
    """Closed-form start used as restart 0, when one is known."""
    p = A.p
    if A.shape == INTERVAL and opts.mode != TWO_PLATE and kernel.radial_decreasing:
        return interval_spacing(kernel, A, N)
    if opts.mode == UNCONSTRAINED and _is_round(A) and kernel.radial_decreasing:
        c, R = A.center_array, A.radius
        if N <= p or (kernel.kind == RIESZ and kernel.s <= p - 2):
            return np.repeat(c[None, :], N, axis=0)
        if A.is_circle and kernel.kind == RIESZ and kernel.s > 0:
            return regular_polygon(N, R * circle_optimal_radius(N, kernel.s), center=c)
        if N == p + 1 and p >= 2:
            return simplex_configuration(p, R * best_simplex_radius(kernel, p), c).points
    if opts.mode == CONSTRAINED and A.shape == SPHERE:
        if A.is_circle:
            return regular_polygon(N, A.radius, center=A.center_array)
        if N == p + 1:
            return simplex_configuration(p, A.radius, A.center_array).points
    if opts.mode == TWO_PLATE and opts.plate is not None and opts.plate.is_circle and A.is_circle:
        B = opts.plate
        return regular_polygon(N, B.radius, center=B.center_array)
    return None


def _restart_value(kernel, A, Xs: List[np.ndarray], Y, resolution, opts) -> Tuple[np.ndarray, PolarizationReport]:
    best = None
    for X in Xs:
        rep = polarization_value(kernel, A, X, resolution, mode=opts.mode, polish_steps=opts.polish_steps, sample=Y)
        if best is None or rep.value > best[1].value:
            best = (X, rep)
    return best


def maximize_polarization(kernel: KernelSpec, A: Domain, N: int,
                          opts: Optional[SolveOptions] = None) -> Tuple[Configuration, PolarizationReport]:
    """Best configuration over all restarts by hard-min value (ties: lowest restart index)."""
    opts = opts or SolveOptions()
    if N < 1:
        raise ValidationError("N must be >= 1")
    if kernel.kind == GEODESIC and not (A.is_circle and opts.mode == CONSTRAINED):
        raise ValidationError("geodesic kernels need A = S^1 and constrained mode")
    if opts.mode == UNCONSTRAINED and not kernel.radial_decreasing:
        logger.warning("unconstrained solve with %s: hull projection assumes a decreasing radial kernel", kernel.label())
    target = opts.plate if opts.mode == TWO_PLATE and opts.plate is not None else A
    if target.p != A.p:
        raise ValidationError("plate B must live in the same R^p as A")

    resolution = max(opts.resolution, 16 * N)
    Y = sample_set(A, resolution)
    diam = max(diameter(target), diameter(A), 1e-12)
    if opts.mode == UNCONSTRAINED:
        def project(X):
            return project_hull_many(A, X)

        def draw(rng):
            return sample_uniform_hull(A, N, rng)
    else:
        def project(X):
            return project_set_many(target, X)

        def draw(rng):
            return sample_uniform_set(target, N, rng)

    warm = warm_start(kernel, A, N, opts)
    streams = np.random.SeedSequence(opts.seed).spawn(opts.restarts)

    def run(i: int):
        rng = np.random.default_rng(streams[i])
        X0 = warm if (i == 0 and warm is not None) else draw(rng)
        X0 = project(X0)
        X = _ascend(kernel, X0, Y, project, opts, diam)
        X, rep = _restart_value(kernel, A, [X0, X], Y, resolution, opts)
        logger.debug("restart %d: value=%.12g%s", i, rep.value, " (warm)" if i == 0 and warm is not None else "")
        return X, rep

    results = parallel_map(run, range(opts.restarts), opts.threads)
    ranked = [(rep.value, -i) for i, (_, rep) in enumerate(results) if np.isfinite(rep.value)]
    if not ranked:
        raise SolverFailure(f"non-finite objective at all {opts.restarts} restarts")
    _, neg_i = max(ranked)
    X, rep = results[-neg_i]
    rep.method.update({
        "solver": "softmin-ascent",
        "restarts": opts.restarts,
        "best_restart": -neg_i,
        "warm_start": warm is not None,
        "beta": [opts.beta0, opts.beta_max, opts.stages],
    })
    logger.info("solve %s on %s N=%d mode=%s: value=%.12g (restart %d)", kernel.label(), A.label(), N, opts.mode,
                rep.value, -neg_i)
    return Configuration(X), rep
