"""Load-sharing reliability systems: closed-form MLEs, simulation, verification.

A k-component parallel system redistributes load as components fail; the
surviving components' hazards change stage by stage. This package fits the
two standard parameterizations of that process ("kim-kvam": constant stage
hazards; "ssk": hazards that switch to linear growth after the s-th
failure), simulates them, and cross-checks the closed-form estimates
against an independent likelihood-only maximizer.
"""

from .errors import (
    DataFileError,
    DimensionMismatch,
    DuplicateLifetime,
    InvalidModel,
    InvalidParams,
    InvalidSampleSize,
    LoadShareError,
    ModelMismatch,
    NoConvergence,
    NonPositiveLifetime,
)
from .estimate import FitResult, closed_form_mle, sufficient_stats
from .model import (
    ModelKind,
    ModelSpec,
    Params,
    SpacingsMatrix,
    SufficientStats,
    log_likelihood,
    score,
    spacings_from_lifetimes,
    stage_exposures,
)
from .oracle import (
    CrosscheckResult,
    OracleConfig,
    crosscheck,
    finite_difference_gradient,
    numeric_mle,
    random_instances,
)
from .simulate import (
    McSummary,
    RngState,
    exponential_spacing,
    mc_study,
    rayleigh_spacing,
    sample_dataset,
    sample_system,
)

__all__ = [
    "LoadShareError",
    "InvalidModel",
    "InvalidParams",
    "DimensionMismatch",
    "ModelMismatch",
    "NonPositiveLifetime",
    "DuplicateLifetime",
    "InvalidSampleSize",
    "NoConvergence",
    "DataFileError",
    "ModelKind",
    "ModelSpec",
    "Params",
    "SpacingsMatrix",
    "SufficientStats",
    "spacings_from_lifetimes",
    "stage_exposures",
    "log_likelihood",
    "score",
    "FitResult",
    "sufficient_stats",
    "closed_form_mle",
    "RngState",
    "McSummary",
    "exponential_spacing",
    "rayleigh_spacing",
    "sample_system",
    "sample_dataset",
    "mc_study",
    "OracleConfig",
    "CrosscheckResult",
    "numeric_mle",
    "finite_difference_gradient",
    "random_instances",
    "crosscheck",
]

__version__ = "0.1.0"
