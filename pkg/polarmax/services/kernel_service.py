"""
Kernel evaluation: Riesz (three branches), inner-product powers, and geodesic
radial profiles on S^1. Pure functions, safe from any thread.
Singular pairs evaluate to +inf; gradients there are 0.
"""
import logging
from typing import Callable, Dict, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from polarmax.models.kernel import GEODESIC, GEODESIC_PROFILES, INNER_POWER, RIESZ, KernelSpec
from polarmax.services.errors import ValidationError

logger = logging.getLogger(__name__)

CIRCLE_TOL = 1e-9


def _as_points(X) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def _check_dims(X: np.ndarray, Y: np.ndarray) -> None:
    if X.shape[1] != Y.shape[1]:
        raise ValidationError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")


def _riesz_value(r: np.ndarray, s: float) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if s > 0:
            return r ** (-s)
        if s == 0:
            return -np.log(r)
        return -(r ** (-s))


def _riesz_slope_over_r(r: np.ndarray, s: float) -> np.ndarray:
    """f'(r)/r for the Riesz profile; zero where r = 0."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if s == 0:
            out = -(r ** -2.0)
        else:
            out = -abs(s) * r ** (-s - 2.0)
    return np.where(r > 0, out, 0.0)


# Geodesic profiles f(t), f'(t) for t in [0, pi]
def _ring(spec: KernelSpec) -> Tuple[Callable, Callable]:
    R, s = spec.R, spec.s

    def f(t):
        base = R * R + 1.0 - 2.0 * R * np.cos(t)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(base > 0, np.abs(base) ** (-s / 2.0), np.inf)

    def df(t):
        base = R * R + 1.0 - 2.0 * R * np.cos(t)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = -s * R * np.sin(t) * np.abs(base) ** (-s / 2.0 - 1.0)
        return np.where(base > 0, out, 0.0)

    return f, df


def _geodesic_riesz(spec: KernelSpec) -> Tuple[Callable, Callable]:
    s = spec.s

    def f(t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(t > 0, np.abs(t) ** (-s), np.inf)

    def df(t):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.where(t > 0, -s * np.abs(t) ** (-s - 1.0), 0.0)

    return f, df


PROFILES: Dict[str, Callable[[KernelSpec], Tuple[Callable, Callable]]] = {
    "ring": _ring,
    "geodesic-riesz": _geodesic_riesz,
}


def _angles_on_circle(X: np.ndarray) -> np.ndarray:
    if X.shape[1] != 2:
        raise ValidationError("geodesic kernels live on S^1 (p = 2)")
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > CIRCLE_TOL):
        raise ValidationError("geodesic kernel applied to a point off S^1")
    return np.arctan2(X[:, 1], X[:, 0])


def _signed_gap(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    d = _angles_on_circle(X)[:, None] - _angles_on_circle(Y)[None, :]
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def potential_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """(n, m) array of K(x_i, y_j)."""
    X, Y = _as_points(X), _as_points(Y)
    _check_dims(X, Y)
    if spec.kind == RIESZ:
        return _riesz_value(cdist(X, Y), spec.s)
    if spec.kind == INNER_POWER:
        return (X @ Y.T) ** spec.k
    f, _ = PROFILES[spec.profile](spec)
    return f(np.abs(_signed_gap(X, Y)))


def gradient_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """(n, m, p) array of dK/dx at (x_i, y_j). Gradients in y follow from symmetry: gradient_matrix(spec, Y, X)."""
    X, Y = _as_points(X), _as_points(Y)
    _check_dims(X, Y)
    if spec.kind == RIESZ:
        diff = X[:, None, :] - Y[None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        return _riesz_slope_over_r(r, spec.s)[..., None] * diff
    if spec.kind == INNER_POWER:
        if spec.k == 0:
            return np.zeros((X.shape[0], Y.shape[0], X.shape[1]))
        g = spec.k * (X @ Y.T) ** (spec.k - 1)
        return g[..., None] * Y[None, :, :]
    _, df = PROFILES[spec.profile](spec)
    gap = _signed_gap(X, Y)
    slope = df(np.abs(gap)) * np.sign(gap)
    tangent = np.stack([-X[:, 1], X[:, 0]], axis=1) / np.sum(X * X, axis=1)[:, None]
    return slope[..., None] * tangent[:, None, :]


def eval_kernel(spec: KernelSpec, x, y) -> float:
    x, y = np.asarray(x, dtype=float).ravel(), np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(potential_matrix(spec, x[None, :], y[None, :])[0, 0])


def eval_gradient(spec: KernelSpec, x, y) -> np.ndarray:
    x, y = np.asarray(x, dtype=float).ravel(), np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    if np.array_equal(x, y):
        raise ValidationError("gradient undefined at coincident points")
    return gradient_matrix(spec, x[None, :], y[None, :])[0, 0]


def _float(v, name: str) -> float:
    try:
        out = float(v)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {v!r}")
    if not np.isfinite(out):
        raise ValidationError(f"{name} must be finite")
    return out


def _even_k(v) -> int:
    k = _float(v, "k")
    if not k.is_integer() or k < 0 or int(k) % 2:
        raise ValidationError("innerpower k must be an even nonnegative integer")
    return int(k)


def parse_kernel(value: Union[str, dict, KernelSpec]) -> KernelSpec:
    """Kernel from 'riesz:2', 'log', 'innerpower:2', 'ring:R:s', 'geodesic-riesz:s' or its JSON form."""
    if isinstance(value, KernelSpec):
        return value
    if isinstance(value, dict):
        kind = str(value.get("kind", "")).lower()
        if kind == RIESZ:
            return KernelSpec.riesz(_float(value.get("s"), "s"))
        if kind == "log":
            return KernelSpec.riesz(0.0)
        if kind == INNER_POWER:
            return KernelSpec.inner_power(_even_k(value.get("k")))
        if kind == GEODESIC:
            profile = str(value.get("profile", ""))
            if profile == "ring":
                return KernelSpec.ring(_float(value.get("R"), "R"), _float(value.get("s"), "s"))
            if profile == "geodesic-riesz":
                return KernelSpec.geodesic_riesz(_float(value.get("s"), "s"))
            raise ValidationError(f"unknown geodesic profile {profile!r}; expected one of {', '.join(GEODESIC_PROFILES)}")
        raise ValidationError(f"unknown kernel kind {kind!r}")
    text = str(value).strip().lower()
    parts = text.split(":")
    head = parts[0]
    if head == "log" and len(parts) == 1:
        return KernelSpec.riesz(0.0)
    if head == RIESZ and len(parts) == 2:
        return KernelSpec.riesz(_float(parts[1], "s"))
    if head == INNER_POWER and len(parts) == 2:
        return KernelSpec.inner_power(_even_k(parts[1]))
    if head == "ring" and len(parts) == 3:
        return KernelSpec.ring(_float(parts[1], "R"), _float(parts[2], "s"))
    if head == "geodesic-riesz" and len(parts) == 2:
        return KernelSpec.geodesic_riesz(_float(parts[1], "s"))
    raise ValidationError(f"invalid kernel {value!r} (try riesz:2, log, innerpower:2, ring:R:s)")
