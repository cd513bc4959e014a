"""
Result shapes returned by the services.
Arrays stay numpy; to_dict() gives the JSON-ready form used by the routes.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from polarmax.models.kernel import KernelSpec


def _rows(arr: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in np.atleast_2d(arr)]


@dataclass(eq=False)
class Configuration:
    """Multiset of N points in R^p (duplicates allowed)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("configuration needs at least one point")
        self.points = pts

    @property
    def N(self) -> int:
        return int(self.points.shape[0])

    @property
    def p(self) -> int:
        return int(self.points.shape[1])

    def to_list(self) -> List[List[float]]:
        return _rows(self.points)


@dataclass(eq=False)
class PolarizationReport:
    value: float
    witness: np.ndarray
    resolution: int
    kernel: KernelSpec
    mode: str = "unconstrained"
    method: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "witness": [float(v) for v in self.witness],
            "resolution": self.resolution,
            "kernel": self.kernel.to_dict(),
            "mode": self.mode,
            "method": self.method,
        }


@dataclass(eq=False)
class DiscreteMeasure:
    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.support = np.atleast_2d(np.asarray(self.support, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        if w.shape[0] != self.support.shape[0]:
            raise ValueError("support and weights differ in length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        self.weights = w

    def to_dict(self) -> dict:
        return {"support": _rows(self.support), "weights": [float(v) for v in self.weights]}


@dataclass(eq=False)
class CircleThresholds:
    N: int
    s: float
    r_bar: float
    R_Ns: float
    x_of_r: Callable[[float], float]

    def lower_condition(self, r: float) -> bool:
        """cos(pi/N) <= x_{r,s}."""
        return bool(np.cos(np.pi / self.N) <= self.x_of_r(r))

    def band_condition(self, r: float) -> bool:
        """R^{-1} <= r <= R."""
        return bool(1.0 / self.R_Ns <= r <= self.R_Ns)

    def to_dict(self) -> dict:
        return {"N": self.N, "s": self.s, "r_bar": self.r_bar, "R_Ns": self.R_Ns, "R_Ns_inv": 1.0 / self.R_Ns}


@dataclass(eq=False)
class CoverReport:
    eta: float
    config: Configuration
    mode: str = "unconstrained"

    def to_dict(self) -> dict:
        return {"eta": float(self.eta), "config": self.config.to_list(), "mode": self.mode}


@dataclass(eq=False)
class CoveringCertificate:
    """Greedy cover of the sample and the lower bound (2r)^-s it certifies."""

    radius: float
    bound: float
    centers: Configuration

    def to_dict(self) -> dict:
        return {"radius": float(self.radius), "bound": float(self.bound), "centers": self.centers.to_list()}


@dataclass(eq=False)
class TransferResult:
    r_N: float
    eta_star: float
    config: Configuration

    def to_dict(self) -> dict:
        return {"r_N": self.r_N, "eta_star": self.eta_star, "config": self.config.to_list()}


@dataclass(eq=False)
class ChebyshevResult:
    value: float
    measure: DiscreteMeasure
    duality_gap: float
    converged: bool
    upper: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "upper": float(self.upper),
            "duality_gap": float(self.duality_gap),
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class SigmaReference:
    value: float
    status: str  # "exact" | "conjectured"


@dataclass(eq=False)
class AsymptoticRun:
    s: float
    d: float
    Ns: List[int]
    values: List[float]
    taus: List[float]
    ratios: List[float]
    slope: float = float("nan")
    intercept: float = float("nan")
    reference: Optional[float] = None
    error: Optional[str] = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.Ns, self.Ns[1:])):
            raise ValueError("Ns must be strictly increasing")

    def rows(self) -> List[list]:
        return [[n, v, t, r] for n, v, t, r in zip(self.Ns, self.values, self.taus, self.ratios)]

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "d": self.d,
            "Ns": list(self.Ns),
            "values": list(self.values),
            "ratios": list(self.ratios),
            "fit": {"slope": self.slope, "intercept": self.intercept},
            "reference": self.reference,
            "error": self.error,
        }


@dataclass(eq=False)
class ReplacementResult:
    replacements: np.ndarray
    dominance_violations: int
    cap_bound: int

    @property
    def n(self) -> int:
        return int(self.replacements.shape[0])

    def to_dict(self) -> dict:
        return {"replacements": _rows(self.replacements), "n": self.n,
                "dominance_violations": self.dominance_violations, "cap_bound": self.cap_bound}


@dataclass(eq=False)
class GainScan:
    c2_values: List[float]
    gains: List[float]
    positive_interval: Optional[tuple] = None

    def rows(self) -> List[list]:
        return [[c, g] for c, g in zip(self.c2_values, self.gains)]
