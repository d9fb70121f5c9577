"""Closed-form maximum likelihood estimation for both load-sharing models.

The log-likelihood of either model is linear in the per-stage exposure
totals S_1..S_k (see :func:`loadshare.model._stage_totals`), which makes the
stationary point available in closed form:

    theta_hat      = n / S_1
    lambda_hat_j   = S_1 / S_{j+1}      for j = 1..k-1

For ``kim-kvam`` S_j = (k-j+1) * t_sum_j and S_1 = k * t_sum_1, giving the
familiar ratio-of-column-sums estimates; ``ssk`` swaps in the squared-spacing
exposure past the switch index and keeps the identical ratio structure. In
particular theta_hat depends only on the first-spacing total, so it is the
same number under both models.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    ModelKind,
    ModelSpec,
    Params,
    SpacingsMatrix,
    SufficientStats,
    _check_dims,
    _stage_totals,
    log_likelihood,
)

__all__ = ["FitResult", "sufficient_stats", "closed_form_mle"]


@dataclass(frozen=True)
class FitResult:
    """Parameter estimates plus the log-likelihood they attain.

    ``stats`` carries the per-stage totals the estimates were computed from,
    so a fit is auditable without re-touching the raw data. ``diagnostics``
    is free-form metadata (the iterative cross-check records its sweep and
    evaluation counts there; the closed form leaves it empty).
    """

    params_hat: Params
    loglik_at_mle: float
    stats: SufficientStats
    model: ModelSpec
    n: int
    diagnostics: dict = field(default_factory=dict)


def sufficient_stats(spec: ModelSpec, t: SpacingsMatrix) -> SufficientStats:
    """Per-stage column totals: spacing sums for kim-kvam, exposure sums for ssk."""
    _check_dims(spec, t)
    if spec.kind is ModelKind.KIM_KVAM:
        sums = t.column_sums
    else:
        sums = _stage_totals(spec, t)
    return SufficientStats(sums=tuple(sums), n=t.n)


def closed_form_mle(spec: ModelSpec, t: SpacingsMatrix) -> FitResult:
    """Maximum likelihood estimates as exact ratios of exposure totals.

    No iteration and no division-by-zero hazard: positivity of every spacing
    guarantees positive totals.
    """
    _check_dims(spec, t)
    totals = _stage_totals(spec, t)
    theta_hat = t.n / totals[0]
    lambdas_hat = totals[0] / totals[1:]
    params_hat = Params(theta_hat, tuple(lambdas_hat))
    return FitResult(
        params_hat=params_hat,
        loglik_at_mle=log_likelihood(spec, params_hat, t),
        stats=sufficient_stats(spec, t),
        model=spec,
        n=t.n,
    )
