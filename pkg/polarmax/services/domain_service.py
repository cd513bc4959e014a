"""
Compact sets A and B: deterministic samplers for the inner minimization,
distances, projections onto the set and onto its convex hull.
"""
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.special import gamma
from scipy.stats import special_ortho_group

from polarmax.models.domain import BALL, CLOUD, CUBE, INTERVAL, SHAPES, SPHERE, Domain
from polarmax.services.errors import ValidationError

logger = logging.getLogger(__name__)

MAX_SPHERE_DIM = 5
HULL_ITERATIONS = 200
HULL_TOL = 1e-10
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def _points(domain: Domain, X) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[1] != domain.p:
        raise ValidationError(f"dimension mismatch: point in R^{arr.shape[1]}, set in R^{domain.p}")
    return arr


def sphere_area(p: int) -> float:
    """Surface area of S^{p-1}."""
    return float(2.0 * np.pi ** (p / 2.0) / gamma(p / 2.0))


# ---- samplers ----

def _circle(n: int, offset: float = 0.0) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n) / n + offset
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def _fibonacci(n: int) -> np.ndarray:
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = k * GOLDEN_ANGLE
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _largest_remainder(total: int, weights: np.ndarray) -> np.ndarray:
    share = total * weights / weights.sum()
    counts = np.floor(share).astype(int)
    short = total - counts.sum()
    if short > 0:
        order = np.argsort(-(share - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def _polar_levels(p: int, n: int) -> np.ndarray:
    """S^{p-1} for p = 4, 5 as a product of angles: polar levels theta_j with counts ~ sin^{p-2}(theta_j),
    each level carrying a sample of S^{p-2} for the remaining angles."""
    h = (sphere_area(p) / n) ** (1.0 / (p - 1))
    L = max(1, int(np.ceil(np.pi / h)))
    theta = np.pi * (np.arange(L) + 0.5) / L
    counts = _largest_remainder(n, np.sin(theta) ** (p - 2))
    rows = []
    for th, c in zip(theta, counts):
        if c == 0:
            continue
        sub = _unit_sphere(p - 1, int(c))
        rows.append(np.hstack([np.full((c, 1), np.cos(th)), np.sin(th) * sub]))
    return np.vstack(rows)


def _unit_sphere(p: int, n: int) -> np.ndarray:
    """S^0 is the pair {1, -1}: at most two points whatever n asks for."""
    if p == 1:
        return np.array([[1.0], [-1.0]])[: max(1, min(n, 2))]
    if p == 2:
        return _circle(n)
    if p == 3:
        return _fibonacci(n)
    if p <= MAX_SPHERE_DIM:
        return _polar_levels(p, n)
    raise ValidationError(f"sphere sampling supports p <= {MAX_SPHERE_DIM}, got p = {p}")


def _box_grid(lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    p = lo.shape[0]
    m = max(1, int(np.ceil(n ** (1.0 / p) - 1e-9)))
    axes = [np.linspace(lo[i], hi[i], m) if m > 1 else np.array([(lo[i] + hi[i]) / 2.0]) for i in range(p)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
    if grid.shape[0] > n:
        idx = np.round(np.linspace(0, grid.shape[0] - 1, n)).astype(int)
        grid = grid[idx]
    return grid


def _ball(p: int, n: int) -> np.ndarray:
    if n == 1:
        return np.zeros((1, p))
    if p == 1:
        return np.linspace(-1.0, 1.0, n).reshape(-1, 1)
    J = max(1, int(round((n - 1) ** (1.0 / p))))
    radii = np.arange(1, J + 1) / J
    counts = _largest_remainder(n - 1, radii ** (p - 1))
    rows = [np.zeros((1, p))]
    for r, c in zip(radii, counts):
        if c:
            rows.append(r * _unit_sphere(p, int(c)))
    return np.vstack(rows)


def _rotation(p: int, seed: int) -> np.ndarray:
    return special_ortho_group.rvs(p, random_state=seed)


def sample_set(domain: Domain, resolution: int, seed: int = 0) -> np.ndarray:
    """Deterministic quasi-uniform sample of A with `resolution` points (point clouds: the cloud itself).

    The 0-sphere (p = 1) has two points, so its sample is capped at two.
    """
    if resolution < 1:
        raise ValidationError("resolution must be >= 1")
    n = int(resolution)
    if domain.shape == CLOUD:
        return domain.cloud_array.copy()
    if domain.shape == INTERVAL:
        lo, hi = domain.bounds()
        return np.linspace(lo[0], hi[0], n).reshape(-1, 1)
    if domain.shape == CUBE:
        lo, hi = domain.bounds()
        return _box_grid(lo, hi, n)
    p = domain.p
    if domain.shape == SPHERE and p == 1 and n > 2:
        logger.info("S^0 has two points; sampling 2 instead of %d", n)
    if p > MAX_SPHERE_DIM:
        raise ValidationError(f"sphere sampling supports p <= {MAX_SPHERE_DIM}, got p = {p}")
    if domain.shape == SPHERE and p == 2 and seed:
        # seeded phase inside one mesh cell
        offset = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi / n)
        unit = _circle(n, offset)
    else:
        unit = _unit_sphere(p, n) if domain.shape == SPHERE else _ball(p, n)
        if seed and p >= 3:
            unit = unit @ _rotation(p, seed).T
    return domain.center_array + domain.radius * unit


def mesh_size(domain: Domain, resolution: int) -> float:
    """Typical spacing of sample_set(domain, resolution)."""
    dim = domain.p - 1 if domain.shape == SPHERE else domain.p
    if domain.shape == CLOUD or dim < 1:
        return 0.0
    if domain.is_circle:
        return 2.0 * np.pi * domain.radius / resolution
    return diameter(domain) * resolution ** (-1.0 / dim)


def jitter_sample(domain: Domain, resolution: int, seed: int = 0) -> np.ndarray:
    """A sample offset by half a mesh against sample_set(domain, resolution)."""
    if domain.is_circle:
        t = 2.0 * np.pi * (np.arange(resolution) + 0.5) / resolution
        return domain.center_array + domain.radius * np.stack([np.cos(t), np.sin(t)], axis=1)
    if domain.shape == SPHERE and domain.p >= 3:
        return sample_set(domain, resolution, seed=seed or 1)
    if domain.shape in (INTERVAL, CUBE):
        Y = sample_set(domain, resolution)
        lo, hi = domain.bounds()
        shift = 0.5 * mesh_size(domain, resolution)
        return np.clip(Y + shift, lo, hi)
    return sample_set(domain, resolution, seed=seed)


# ---- distances and projections ----

def distances_to_set(domain: Domain, X) -> np.ndarray:
    X = _points(domain, X)
    if domain.shape == SPHERE:
        return np.abs(np.linalg.norm(X - domain.center_array, axis=1) - domain.radius)
    if domain.shape == BALL:
        return np.maximum(np.linalg.norm(X - domain.center_array, axis=1) - domain.radius, 0.0)
    if domain.shape in (CUBE, INTERVAL):
        lo, hi = domain.bounds()
        return np.linalg.norm(X - np.clip(X, lo, hi), axis=1)
    return cdist(X, domain.cloud_array).min(axis=1)


def distance_to_set(domain: Domain, x) -> float:
    return float(distances_to_set(domain, x)[0])


def _project_ball(X: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    d = X - center
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    scale = np.where(norms > radius, radius / np.where(norms > 0, norms, 1.0), 1.0)
    return center + d * scale


def _project_simplex_rows(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex (sort-based)."""
    n, k = V.shape
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, k + 1)
    cond = U - css / ind > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(n), rho] / (rho + 1.0)
    return np.maximum(V - theta[:, None], 0.0)


def _project_cloud_hull(X: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Nearest points of conv(P): accelerated projected gradient on the convex weights."""
    k = P.shape[0]
    if k == 1:
        return np.repeat(P, X.shape[0], axis=0)
    L = np.linalg.norm(P, 2) ** 2
    if L == 0:
        return np.zeros_like(X)
    step = 1.0 / L
    W = np.full((X.shape[0], k), 1.0 / k)
    Z, t = W.copy(), 1.0
    for _ in range(HULL_ITERATIONS):
        grad = (Z @ P - X) @ P.T
        W_next = _project_simplex_rows(Z - step * grad)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        Z = W_next + ((t - 1.0) / t_next) * (W_next - W)
        done = np.max(np.abs(W_next - W)) <= HULL_TOL
        W, t = W_next, t_next
        if done:
            break
    return W @ P


def project_hull_many(domain: Domain, X) -> np.ndarray:
    X = _points(domain, X)
    if domain.shape in (SPHERE, BALL):
        return _project_ball(X, domain.center_array, domain.radius)
    if domain.shape in (CUBE, INTERVAL):
        lo, hi = domain.bounds()
        return np.clip(X, lo, hi)
    return _project_cloud_hull(X, domain.cloud_array)


def project_convex_hull(domain: Domain, x) -> np.ndarray:
    """Nearest point of conv(A)."""
    return project_hull_many(domain, x)[0]


def project_set_many(domain: Domain, X) -> np.ndarray:
    X = _points(domain, X)
    if domain.shape == SPHERE:
        c = domain.center_array
        d = X - c
        norms = np.linalg.norm(d, axis=1, keepdims=True)
        e1 = np.zeros(domain.p)
        e1[0] = 1.0
        d = np.where(norms > 0, d, e1)
        norms = np.where(norms > 0, norms, 1.0)
        return c + domain.radius * d / norms
    if domain.shape == CLOUD:
        P = domain.cloud_array
        return P[np.argmin(cdist(X, P), axis=1)]
    return project_hull_many(domain, X)


def project_to_set(domain: Domain, x) -> np.ndarray:
    """Nearest point of A itself."""
    return project_set_many(domain, x)[0]


# ---- random draws, size ----

def sample_uniform_hull(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    """n random points in conv(A)."""
    p = domain.p
    if domain.shape in (SPHERE, BALL):
        g = rng.standard_normal((n, p))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = domain.radius * rng.random(n) ** (1.0 / p)
        return domain.center_array + r[:, None] * g
    if domain.shape in (CUBE, INTERVAL):
        lo, hi = domain.bounds()
        return lo + (hi - lo) * rng.random((n, p))
    P = domain.cloud_array
    return rng.dirichlet(np.ones(P.shape[0]), size=n) @ P


def sample_uniform_set(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    """n random points of A itself."""
    if domain.shape == SPHERE:
        g = rng.standard_normal((n, domain.p))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return domain.center_array + domain.radius * g
    if domain.shape == CLOUD:
        P = domain.cloud_array
        return P[rng.integers(0, P.shape[0], size=n)]
    return sample_uniform_hull(domain, n, rng)


def diameter(domain: Domain) -> float:
    if domain.shape in (SPHERE, BALL):
        return 2.0 * domain.radius
    if domain.shape == CUBE:
        return domain.side * np.sqrt(domain.p)
    if domain.shape == INTERVAL:
        return abs(domain.b - domain.a)
    P = domain.cloud_array
    return float(pdist(P).max()) if P.shape[0] > 1 else 0.0


def intrinsic_dimension(domain: Domain) -> int:
    if domain.shape == SPHERE:
        return domain.p - 1
    if domain.shape == CLOUD:
        return 0
    return domain.p


def hausdorff_measure(domain: Domain) -> Optional[float]:
    """H_d(A) for d = intrinsic_dimension(A); None for point clouds."""
    if domain.shape == SPHERE:
        return sphere_area(domain.p) * domain.radius ** (domain.p - 1)
    if domain.shape == BALL:
        return float(np.pi ** (domain.p / 2.0) / gamma(domain.p / 2.0 + 1.0)) * domain.radius ** domain.p
    if domain.shape == CUBE:
        return domain.side ** domain.p
    if domain.shape == INTERVAL:
        return abs(domain.b - domain.a)
    return None


# ---- parsing ----

def load_cloud(path: Union[str, Path]) -> Domain:
    """Point cloud from CSV, one point per row."""
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except (OSError, ValueError) as e:
        raise ValidationError(f"cannot read point cloud {path}: {e}")
    if arr.size == 0:
        raise ValidationError(f"point cloud {path} is empty")
    return Domain.cloud(arr)


def _num(v, name: str) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {v!r}")


def _dim(v) -> int:
    try:
        p = int(v)
    except (TypeError, ValueError):
        raise ValidationError(f"dimension must be an integer, got {v!r}")
    if p < 1:
        raise ValidationError("dimension must be >= 1")
    return p


def _positive(v, name: str) -> float:
    out = _num(v, name)
    if out <= 0:
        raise ValidationError(f"{name} must be positive")
    return out


def parse_domain(value: Union[str, dict, Domain]) -> Domain:
    """Set from 'circle[:r]', 'sphere:p[:r]', 'ball:p[:r]', 'cube:p[:side]', 'interval:a:b', 'cloud:path.csv' or JSON."""
    if isinstance(value, Domain):
        return value
    if isinstance(value, dict):
        shape = str(value.get("shape", "")).lower()
        if shape == "circle":
            return Domain.circle(_positive(value.get("radius", 1.0), "radius"), value.get("center"))
        if shape in (SPHERE, BALL):
            p = _dim(value.get("p"))
            center = value.get("center")
            if center is not None and len(center) != p:
                raise ValidationError("center dimension does not match p")
            make = Domain.sphere if shape == SPHERE else Domain.ball
            return make(p, _positive(value.get("radius", 1.0), "radius"), center)
        if shape == CUBE:
            p = _dim(value.get("p"))
            corner = value.get("corner")
            if corner is not None and len(corner) != p:
                raise ValidationError("corner dimension does not match p")
            return Domain.cube(p, _positive(value.get("side", 1.0), "side"), corner)
        if shape == INTERVAL:
            a, b = _num(value.get("a", 0.0), "a"), _num(value.get("b", 1.0), "b")
            if not a < b:
                raise ValidationError("interval needs a < b")
            return Domain.interval(a, b)
        if shape == CLOUD:
            if value.get("points") is not None:
                return Domain.cloud(value["points"])
            return load_cloud(value.get("path", ""))
        raise ValidationError(f"unknown shape {shape!r}; expected circle or one of {', '.join(SHAPES)}")
    text = str(value).strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    parts = rest.split(":") if rest else []
    if head == "circle" and len(parts) <= 1:
        return Domain.circle(_positive(parts[0], "radius") if parts else 1.0)
    if head in (SPHERE, BALL) and 1 <= len(parts) <= 2:
        make = Domain.sphere if head == SPHERE else Domain.ball
        return make(_dim(parts[0]), _positive(parts[1], "radius") if len(parts) == 2 else 1.0)
    if head == CUBE and 1 <= len(parts) <= 2:
        return Domain.cube(_dim(parts[0]), _positive(parts[1], "side") if len(parts) == 2 else 1.0)
    if head == INTERVAL and len(parts) in (0, 2):
        a, b = (_num(parts[0], "a"), _num(parts[1], "b")) if parts else (0.0, 1.0)
        if not a < b:
            raise ValidationError("interval needs a < b")
        return Domain.interval(a, b)
    if head == CLOUD and rest:
        return load_cloud(rest)
    raise ValidationError(f"invalid set {value!r} (try circle, circle:0.5, sphere:3, ball:2, cube:2, interval:0:1, cloud:pts.csv)")
