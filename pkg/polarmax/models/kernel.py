"""Kernel descriptor shared by every service."""
from dataclasses import dataclass
from typing import Tuple

RIESZ = "riesz"
INNER_POWER = "innerpower"
GEODESIC = "geodesic"

KERNEL_KINDS: Tuple[str, ...] = (RIESZ, INNER_POWER, GEODESIC)
GEODESIC_PROFILES: Tuple[str, ...] = ("ring", "geodesic-riesz")


@dataclass(frozen=True)
class KernelSpec:
    """Pairwise potential K(x, y).

    kind "riesz" uses s (all three branches), "innerpower" uses k,
    "geodesic" uses profile plus its parameters (R, s) on S^1.
    """

    kind: str = RIESZ
    s: float = 0.0
    k: int = 0
    profile: str = ""
    R: float = 1.0

    @classmethod
    def riesz(cls, s: float) -> "KernelSpec":
        return cls(kind=RIESZ, s=float(s))

    @classmethod
    def inner_power(cls, k: int) -> "KernelSpec":
        return cls(kind=INNER_POWER, k=int(k))

    @classmethod
    def ring(cls, R: float, s: float) -> "KernelSpec":
        return cls(kind=GEODESIC, profile="ring", R=float(R), s=float(s))

    @classmethod
    def geodesic_riesz(cls, s: float) -> "KernelSpec":
        return cls(kind=GEODESIC, profile="geodesic-riesz", s=float(s))

    @property
    def singular(self) -> bool:
        """True when K(x, x) is +inf."""
        if self.kind == RIESZ:
            return self.s >= 0
        if self.kind == GEODESIC:
            return self.profile == "geodesic-riesz" or (self.profile == "ring" and self.R == 1.0 and self.s > 0)
        return False

    @property
    def radial_decreasing(self) -> bool:
        return self.kind in (RIESZ, GEODESIC)

    def to_dict(self) -> dict:
        if self.kind == RIESZ:
            return {"kind": RIESZ, "s": self.s}
        if self.kind == INNER_POWER:
            return {"kind": INNER_POWER, "k": self.k}
        if self.profile == "ring":
            return {"kind": GEODESIC, "profile": "ring", "R": self.R, "s": self.s}
        return {"kind": GEODESIC, "profile": self.profile, "s": self.s}

    def label(self) -> str:
        if self.kind == RIESZ:
            return "log" if self.s == 0 else f"riesz:{self.s:g}"
        if self.kind == INNER_POWER:
            return f"innerpower:{self.k}"
        if self.profile == "ring":
            return f"ring:{self.R:g}:{self.s:g}"
        return f"{self.profile}:{self.s:g}"
