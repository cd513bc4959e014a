"""Compact set descriptors (A and B plates)."""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

SPHERE = "sphere"
BALL = "ball"
CUBE = "cube"
INTERVAL = "interval"
CLOUD = "cloud"

SHAPES: Tuple[str, ...] = (SPHERE, BALL, CUBE, INTERVAL, CLOUD)


@dataclass(frozen=True)
class Domain:
    """A compact set in R^p. A circle is a sphere with p = 2."""

    shape: str
    p: int
    radius: float = 1.0
    center: Tuple[float, ...] = ()
    side: float = 1.0
    corner: Tuple[float, ...] = ()
    a: float = 0.0
    b: float = 1.0
    points: Tuple[Tuple[float, ...], ...] = ()

    @classmethod
    def sphere(cls, p: int, radius: float = 1.0, center: Optional[Sequence[float]] = None) -> "Domain":
        c = tuple(float(v) for v in center) if center is not None else (0.0,) * p
        return cls(shape=SPHERE, p=int(p), radius=float(radius), center=c)

    @classmethod
    def circle(cls, radius: float = 1.0, center: Optional[Sequence[float]] = None) -> "Domain":
        return cls.sphere(2, radius, center)

    @classmethod
    def ball(cls, p: int, radius: float = 1.0, center: Optional[Sequence[float]] = None) -> "Domain":
        c = tuple(float(v) for v in center) if center is not None else (0.0,) * p
        return cls(shape=BALL, p=int(p), radius=float(radius), center=c)

    @classmethod
    def cube(cls, p: int, side: float = 1.0, corner: Optional[Sequence[float]] = None) -> "Domain":
        c = tuple(float(v) for v in corner) if corner is not None else (0.0,) * p
        return cls(shape=CUBE, p=int(p), side=float(side), corner=c)

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0) -> "Domain":
        return cls(shape=INTERVAL, p=1, a=float(a), b=float(b))

    @classmethod
    def cloud(cls, points) -> "Domain":
        arr = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(shape=CLOUD, p=arr.shape[1], points=tuple(tuple(float(v) for v in row) for row in arr))

    @property
    def is_circle(self) -> bool:
        return self.shape == SPHERE and self.p == 2

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float) if self.center else np.zeros(self.p)

    @property
    def corner_array(self) -> np.ndarray:
        return np.asarray(self.corner, dtype=float) if self.corner else np.zeros(self.p)

    @property
    def cloud_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, self.p)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower/upper corners for box-shaped sets."""
        if self.shape == INTERVAL:
            return np.array([min(self.a, self.b)]), np.array([max(self.a, self.b)])
        lo = self.corner_array
        return lo, lo + self.side

    def to_dict(self) -> dict:
        if self.shape in (SPHERE, BALL):
            return {"shape": self.shape, "p": self.p, "radius": self.radius, "center": list(self.center_array)}
        if self.shape == CUBE:
            return {"shape": CUBE, "p": self.p, "side": self.side, "corner": list(self.corner_array)}
        if self.shape == INTERVAL:
            return {"shape": INTERVAL, "a": self.a, "b": self.b}
        return {"shape": CLOUD, "p": self.p, "points": [list(row) for row in self.points]}

    def label(self) -> str:
        if self.is_circle and self.radius != 1.0:
            return f"circle:{self.radius:g}"
        if self.is_circle:
            return "circle"
        if self.shape in (SPHERE, BALL, CUBE):
            return f"{self.shape}:{self.p}"
        if self.shape == INTERVAL:
            return f"interval:{self.a:g}:{self.b:g}"
        return f"cloud[{len(self.points)}]"
