"""
Large-N constants: tau_{s,d}, sigma_{s,d} references, Riemann and hexagonal
Epstein zeta, and empirical P*/tau ratio runs.
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import bernoulli, factorial, gamma, gammaincc

from polarmax.models.domain import Domain
from polarmax.models.kernel import RIESZ, KernelSpec
from polarmax.models.options import SolveOptions
from polarmax.models.results import AsymptoticRun, SigmaReference
from polarmax.services.domain_service import hausdorff_measure
from polarmax.services.errors import PolarmaxError, ValidationError
from polarmax.services.pool import parallel_map
from polarmax.services.solver_service import circle_optimal_value, maximize_polarization

logger = logging.getLogger(__name__)

HEX_BASIS = np.array([[1.0, 0.5], [0.0, np.sqrt(3.0) / 2.0]])  # columns are the generators
HEX_COVOLUME = np.sqrt(3.0) / 2.0
HEX_CIRCUMRADIUS = 1.0 / np.sqrt(3.0)  # of the Voronoi cell
EM_TERMS = 10
EM_CUTOFF = 10
EWALD_RADIUS = 7.0


def tau(s: float, d: float, N: int) -> float:
    """N^{s/d} if s > d, N log N if s = d, N if s < d (branch by exact comparison)."""
    if N < 2:
        raise ValidationError("tau needs N >= 2")
    if s > d:
        return float(N ** (s / d))
    if s == d:
        return float(N * math.log(N))
    return float(N)


def unit_ball_volume(p: int) -> float:
    return float(math.pi ** (p / 2.0) / gamma(p / 2.0 + 1.0))


def riemann_zeta(s: float) -> float:
    """Euler-Maclaurin with a cutoff of 10 terms and 10 Bernoulli corrections."""
    if s <= 1:
        raise ValidationError("riemann_zeta needs s > 1")
    n = EM_CUTOFF
    terms = [k ** (-s) for k in range(1, n)]
    terms.append(n ** (1.0 - s) / (s - 1.0))
    terms.append(0.5 * n ** (-s))
    B = bernoulli(2 * EM_TERMS)
    rising = s  # s (s+1) ... (s + 2k - 2)
    for k in range(1, EM_TERMS + 1):
        terms.append(B[2 * k] / factorial(2 * k, exact=True) * rising * n ** (-s - 2 * k + 1))
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return math.fsum(terms)


def _hex_vectors(radius: float, basis: np.ndarray = HEX_BASIS) -> np.ndarray:
    """Nonzero lattice vectors of norm <= radius."""
    shortest = min(np.linalg.norm(basis[:, 0]), np.linalg.norm(basis[:, 1]))
    gram = basis.T @ basis
    # coefficient bound from the smallest Gram eigenvalue
    M = int(math.ceil(radius / math.sqrt(np.linalg.eigvalsh(gram).min()))) + 1
    rng = np.arange(-M, M + 1)
    n, m = np.meshgrid(rng, rng, indexing="ij")
    coeffs = np.stack([n.ravel(), m.ravel()], axis=1)
    V = coeffs @ basis.T
    norms = np.linalg.norm(V, axis=1)
    keep = (norms > 0.5 * shortest) & (norms <= radius)
    return V[keep]


def epstein_tail_bound(s: float, radius: float) -> float:
    """Rigorous bound on sum_{|v| > R} |v|^-s via the Voronoi-cell comparison with the radial integral."""
    rho = HEX_CIRCUMRADIUS
    if radius <= rho:
        return float("inf")
    return float((1.0 + rho / radius) ** s * (2.0 * math.pi / HEX_COVOLUME) * (radius - rho) ** (2.0 - s) / (s - 2.0))


def epstein_zeta_hex(s: float, radius_cutoff: float = 200.0):
    """(direct sum of |v|^-s over 0 < |v| <= cutoff, tail bound); |n + m w|^2 = n^2 + nm + m^2."""
    if s <= 2:
        raise ValidationError("Epstein zeta needs s > 2")
    M = int(math.ceil(2.0 * radius_cutoff / math.sqrt(3.0))) + 1
    rng = np.arange(-M, M + 1, dtype=float)
    n, m = np.meshgrid(rng, rng, indexing="ij")
    q = n * n + n * m + m * m
    q = q[(q > 0) & (q <= radius_cutoff * radius_cutoff)]
    value = math.fsum(np.sort(q ** (-s / 2.0)))
    return value, epstein_tail_bound(s, radius_cutoff)


def epstein_sector_sum(s: float, radius_cutoff: float = 200.0) -> float:
    """Sum over lattice vectors with polar angle in [0, 60 degrees); six copies give the full sum."""
    V = _hex_vectors(radius_cutoff)
    ang = np.mod(np.arctan2(V[:, 1], V[:, 0]), 2.0 * math.pi)
    sector = (ang >= -1e-12) & (ang < math.pi / 3.0 - 1e-9)
    return math.fsum(np.sort(np.linalg.norm(V[sector], axis=1) ** (-s)))


def epstein_zeta_hex_ewald(s: float) -> float:
    """Theta-function (Ewald) split at t = 1 with the dual-lattice sum in closed integral form."""
    if s <= 2:
        raise ValidationError("Epstein zeta needs s > 2")
    a = s / 2.0
    V = _hex_vectors(EWALD_RADIUS)
    dual = np.linalg.inv(HEX_BASIS).T
    W = _hex_vectors(EWALD_RADIUS, dual)
    x = math.pi * np.sum(V * V, axis=1)
    direct = math.fsum(np.sort(gamma(a) * gammaincc(a, x) * x ** (-a)))
    y = math.pi * np.sum(W * W, axis=1)
    recip = math.fsum(sorted(quad(lambda u, c=c: u ** (-a) * math.exp(-c * u), 1.0, np.inf, epsabs=1e-300, epsrel=1e-12)[0]
                             for c in y))
    bracket = 2.0 / (HEX_COVOLUME * (s - 2.0)) - 2.0 / s + direct + recip / HEX_COVOLUME
    return float(math.pi ** a / gamma(a) * bracket)


def sigma_reference(s: float, d: int) -> Optional[SigmaReference]:
    """sigma_{s,d}: exact for d = s and for d = 1 < s; conjectured for d = 2 < s; otherwise None."""
    if d >= 1 and float(d) == float(s):
        return SigmaReference(unit_ball_volume(int(d)), "exact")
    if d == 1 and s > 1:
        return SigmaReference(2.0 * riemann_zeta(s) * (2.0 ** s - 1.0), "exact")
    if d == 2 and s > 2:
        return SigmaReference((3.0 ** (s / 2.0) - 1.0) * epstein_zeta_hex_ewald(s) / 2.0, "conjectured")
    return None


def _affine_fit(Ns: Sequence[int], ratios: Sequence[float]):
    """Least-squares ratio = intercept + slope / N over the last three points."""
    if len(Ns) < 2:
        return float("nan"), float("nan")
    x = 1.0 / np.asarray(Ns[-3:], dtype=float)
    slope, intercept = np.polyfit(x, np.asarray(ratios[-3:], dtype=float), 1)
    return float(slope), float(intercept)


def h_star_ratio_run(kernel: KernelSpec, A: Domain, d: float, Ns: Sequence[int],
                     opts: Optional[SolveOptions] = None) -> AsymptoticRun:
    """Solve at every N (in parallel), ratios P*/tau_{s,d}(N), affine fit in 1/N."""
    if kernel.kind != RIESZ:
        raise ValidationError("ratio runs need a Riesz kernel")
    opts = opts or SolveOptions()
    Ns = [int(n) for n in Ns]
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValidationError("Ns must be non-empty and strictly increasing")
    if Ns[0] < 2:
        raise ValidationError("ratio runs need N >= 2")
    if any(n > 256 for n in Ns):
        logger.warning("ratio run with N > 256 is beyond desk scale")
    s = kernel.s

    def solve(N: int):
        try:
            _, rep = maximize_polarization(kernel, A, N, opts)
            return rep.value, None
        except PolarmaxError as e:
            return None, f"N={N}: {e}"

    outcomes = parallel_map(solve, Ns, opts.threads)
    values: List[float] = []
    error = None
    for value, err in outcomes:
        if err:
            error = err
            break
        values.append(float(value))
    kept = Ns[: len(values)]
    taus = [tau(s, d, N) for N in kept]
    ratios = [v / t for v, t in zip(values, taus)]
    slope, intercept = _affine_fit(kept, ratios)
    ref = sigma_reference(s, int(d)) if float(d).is_integer() else None
    H = hausdorff_measure(A)
    reference = ref.value / H ** (s / d) if ref is not None and H and s >= d else None
    if error:
        logger.error("ratio run aborted: %s", error)
    return AsymptoticRun(s=s, d=d, Ns=kept, values=values, taus=taus, ratios=ratios, slope=slope,
                         intercept=intercept, reference=reference, error=error)


def small_s_sweep(N: int, ss: Sequence[float]) -> List[list]:
    """Rows (s, P_s*(S^1, N), (P_s* - N)/s); the last column tends to P_0*(S^1, N) = 0 as s -> 0."""
    rows = []
    for s in ss:
        value = circle_optimal_value(N, float(s))
        rows.append([float(s), value, (value - N) / float(s)])
    return rows
