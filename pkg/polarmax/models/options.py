"""Solver options and the resolved experiment config echoed into outputs."""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from polarmax.models.domain import Domain

UNCONSTRAINED = "unconstrained"
CONSTRAINED = "constrained"
TWO_PLATE = "two-plate"
MODES = (UNCONSTRAINED, CONSTRAINED, TWO_PLATE)


@dataclass(frozen=True)
class SolveOptions:
    restarts: int = 8
    iterations: int = 40
    beta0: float = 10.0
    beta_max: float = 1e5
    stages: int = 20
    step: float = 0.1
    tol: float = 1e-10
    seed: int = 0
    mode: str = UNCONSTRAINED
    plate: Optional[Domain] = None
    resolution: int = 512
    polish_steps: int = 25
    threads: Optional[int] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.beta0 < self.beta_max:
            raise ValueError("beta0 must be smaller than beta_max")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        if self.mode == TWO_PLATE and self.plate is None:
            raise ValueError("two-plate mode needs a plate B")

    def betas(self) -> np.ndarray:
        """Geometric annealing schedule beta0 -> beta_max."""
        return np.geomspace(self.beta0, self.beta_max, self.stages)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["plate"] = self.plate.to_dict() if self.plate is not None else None
        out.pop("threads")
        return out


@dataclass
class ExperimentConfig:
    """Fully resolved subcommand config; hashed and echoed into every output."""

    subcommand: str
    values: Dict[str, Any] = field(default_factory=dict)
    config_hash: str = ""

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, **self.values}
