# Models package - dataclasses passed between services and routes.
from polarmax.models.domain import Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.options import ExperimentConfig, SolveOptions
from polarmax.models.results import (
    AsymptoticRun,
    ChebyshevResult,
    CircleThresholds,
    Configuration,
    CoverReport,
    CoveringCertificate,
    DiscreteMeasure,
    GainScan,
    PolarizationReport,
    ReplacementResult,
    SigmaReference,
    TransferResult,
)

__all__ = [
    "AsymptoticRun",
    "ChebyshevResult",
    "CircleThresholds",
    "Configuration",
    "CoverReport",
    "CoveringCertificate",
    "DiscreteMeasure",
    "Domain",
    "ExperimentConfig",
    "GainScan",
    "KernelSpec",
    "PolarizationReport",
    "ReplacementResult",
    "SigmaReference",
    "SolveOptions",
    "TransferResult",
]
