"""Domain types and exact log-likelihood machinery for load-sharing systems.

A load-sharing system is a parallel system of k components in which each
failure redistributes the load onto the survivors and changes their hazard.
Stage j is the period between the (j-1)-th and j-th failures, during which
k-j+1 components survive; the observable for system i is the spacing t_ij
between consecutive ordered failures.

Two hazard regimes are supported, selected by :class:`ModelSpec`:

* ``kim-kvam`` -- every stage has a constant per-component hazard
  ``lambda_{j-1} * theta`` (``lambda_0 = 1``), so each stage spacing is
  exponential with rate ``(k-j+1) * lambda_{j-1} * theta``.
* ``ssk`` -- constant hazards through the s-th failure; from stage s+1 on,
  the per-component hazard grows linearly in the time elapsed since the
  previous failure (``lambda_{j-1} * theta * t``), making those stage
  spacings Rayleigh-distributed.

Both regimes share one algebraic core: each stage contributes an "exposure"
(survivor-weighted time on test, or half the survivor-weighted squared
spacing in the accelerating phase) and the log-likelihood is linear in the
per-stage exposure totals. That structure is what makes the maximum
likelihood estimates available in closed form, see :mod:`loadshare.estimate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateLifetime,
    InvalidModel,
    InvalidParams,
    ModelMismatch,
    NonPositiveLifetime,
)

__all__ = [
    "ModelKind",
    "ModelSpec",
    "Params",
    "SpacingsMatrix",
    "SufficientStats",
    "spacings_from_lifetimes",
    "stage_exposures",
    "log_likelihood",
    "score",
]


class ModelKind(str, Enum):
    """Which hazard regime governs the stages."""

    KIM_KVAM = "kim-kvam"
    SSK = "ssk"


@dataclass(frozen=True)
class ModelSpec:
    """Model identity: hazard regime, component count k, and switch index s.

    ``s`` is the failure count after which the ``ssk`` regime switches from
    constant to linearly increasing hazards; it must satisfy 2 <= s <= k-1
    and must be omitted for ``kim-kvam``.
    """

    kind: ModelKind
    k: int
    s: int | None = None

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool):
            raise InvalidModel(f"k must be an integer, got {self.k!r}")
        if self.k < 2:
            raise InvalidModel(f"k must be at least 2, got {self.k}")
        if self.kind is ModelKind.KIM_KVAM:
            if self.s is not None:
                raise InvalidModel("s is only meaningful for the ssk model")
        elif self.kind is ModelKind.SSK:
            if self.s is None:
                raise InvalidModel("ssk model requires a switch index s")
            if not isinstance(self.s, int) or isinstance(self.s, bool):
                raise InvalidModel(f"s must be an integer, got {self.s!r}")
            if not 2 <= self.s <= self.k - 1:
                raise InvalidModel(
                    f"s must satisfy 2 <= s <= k-1, got s={self.s} with k={self.k}"
                )
        else:  # pragma: no cover - enum is closed
            raise InvalidModel(f"unknown model kind {self.kind!r}")

    @classmethod
    def kim_kvam(cls, k: int) -> "ModelSpec":
        return cls(ModelKind.KIM_KVAM, k)

    @classmethod
    def ssk(cls, k: int, s: int) -> "ModelSpec":
        return cls(ModelKind.SSK, k, s)

    @property
    def n_params(self) -> int:
        """Number of free parameters: theta plus k-1 load-share multipliers."""
        return self.k


@dataclass(frozen=True)
class Params:
    """Parameter vector (theta, lambda_1, ..., lambda_{k-1}).

    ``theta`` is the initial per-component failure rate; ``lambdas[j-1]`` is
    the multiplier applied to ``theta`` during stage j+1. The stage-1
    multiplier ``lambda_0 = 1`` is implicit and never stored.
    """

    theta: float
    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "lambdas", tuple(float(l) for l in self.lambdas))
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise InvalidParams(f"theta must be finite and > 0, got {self.theta}")
        if len(self.lambdas) == 0:
            raise InvalidParams("at least one load-share multiplier is required")
        for j, lam in enumerate(self.lambdas, start=1):
            if not (math.isfinite(lam) and lam > 0):
                raise InvalidParams(f"lambda_{j} must be finite and > 0, got {lam}")

    def as_array(self) -> np.ndarray:
        """Flat (theta, lambda_1, ..., lambda_{k-1}) vector."""
        return np.concatenate(([self.theta], self.lambdas))

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Params":
        values = list(values)
        return cls(values[0], tuple(values[1:]))


class SpacingsMatrix:
    """n x k matrix of inter-failure spacings, one independent system per row.

    Column j holds the spacing between the (j-1)-th and j-th ordered failures
    (the 0-th failure time is 0). Every entry must be finite and strictly
    positive. The instance is immutable; column aggregates consumed by the
    likelihood are computed once at construction.
    """

    __slots__ = (
        "_data",
        "_column_sums",
        "_column_square_sums",
        "_column_log_sums",
        "_exposure_totals_constant",
        "_exposure_totals_accelerating",
    )

    def __init__(self, data):
        arr = np.array(data, dtype=float)
        if arr.ndim != 2:
            raise DimensionMismatch(
                f"spacings must form a 2-D matrix, got {arr.ndim} dimension(s)"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"spacings matrix must be non-empty, got shape {arr.shape}")
        bad = ~(np.isfinite(arr) & (arr > 0))
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise NonPositiveLifetime(
                f"spacing at row {i + 1}, column {j + 1} must be finite and > 0 "
                f"(got {arr[i, j]})",
                row=i + 1,
                col=j + 1,
            )
        arr.flags.writeable = False
        self._data = arr
        # Aggregates sufficient for every likelihood/score/estimator call.
        weights = np.arange(arr.shape[1], 0, -1, dtype=float)  # survivors per stage
        self._column_sums = arr.sum(axis=0)
        self._column_square_sums = (arr * arr).sum(axis=0)
        self._column_log_sums = np.log(arr).sum(axis=0)
        self._exposure_totals_constant = weights * self._column_sums
        self._exposure_totals_accelerating = 0.5 * weights * self._column_square_sums

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def k(self) -> int:
        return self._data.shape[1]

    @property
    def column_sums(self) -> np.ndarray:
        """Per-stage spacing totals t_sum[j] = sum_i t_ij."""
        return self._column_sums

    def __repr__(self):
        return f"SpacingsMatrix(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class SufficientStats:
    """Per-stage column totals through which the data enter the closed forms.

    For ``kim-kvam`` these are the plain spacing totals; for ``ssk`` they are
    the exposure totals (survivor-weighted, squared past the switch).
    """

    sums: tuple[float, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "sums", tuple(float(v) for v in self.sums))
        for j, v in enumerate(self.sums, start=1):
            if not (math.isfinite(v) and v > 0):
                raise InvalidParams(f"stage {j} sufficient statistic must be > 0, got {v}")


@lru_cache(maxsize=None)
def _log_factorial(k: int) -> float:
    # Summation instead of factorial() so large k cannot overflow.
    return sum(math.log(i) for i in range(2, k + 1))


def _check_dims(spec: ModelSpec, t: SpacingsMatrix, params: Params | None = None) -> None:
    if t.k != spec.k:
        raise DimensionMismatch(
            f"data has {t.k} columns but the model expects k={spec.k}"
        )
    if params is not None and len(params.lambdas) != spec.k - 1:
        raise DimensionMismatch(
            f"model with k={spec.k} needs {spec.k - 1} multipliers, "
            f"got {len(params.lambdas)}"
        )


def _stage_totals(spec: ModelSpec, t: SpacingsMatrix) -> np.ndarray:
    """Per-stage exposure totals S_j; the likelihood exponent is theta * S . lam.

    kim-kvam: S_j = (k-j+1) * sum_i t_ij for every stage.
    ssk:      same through stage s, then S_j = (k-j+1)/2 * sum_i t_ij^2.
    """
    if spec.kind is ModelKind.KIM_KVAM:
        return t._exposure_totals_constant
    return np.concatenate(
        (t._exposure_totals_constant[: spec.s], t._exposure_totals_accelerating[spec.s :])
    )


def spacings_from_lifetimes(lifetimes) -> SpacingsMatrix:
    """Convert raw component lifetimes to inter-failure spacings.

    Each row holds the k individual component lifetimes of one system in any
    order. The row is sorted ascending and consecutive differences are taken
    (first spacing measured from time 0). Ties within a row are rejected:
    a zero spacing would make the load-share estimates undefined, and
    breaking ties is a caller policy, not something done silently here.
    """
    arr = np.array(lifetimes, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(
            f"lifetimes must form a 2-D matrix, got {arr.ndim} dimension(s)"
        )
    bad = ~(np.isfinite(arr) & (arr > 0))
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise NonPositiveLifetime(
            f"lifetime at row {i + 1}, column {j + 1} must be finite and > 0 "
            f"(got {arr[i, j]})",
            row=i + 1,
            col=j + 1,
        )
    ordered = np.sort(arr, axis=1)
    for i in range(ordered.shape[0]):
        row = ordered[i]
        dup = np.nonzero(row[1:] == row[:-1])[0]
        if dup.size:
            raise DuplicateLifetime(
                f"system {i + 1} contains the lifetime {row[dup[0]]} twice; "
                "tied failures give a zero spacing",
                row=i + 1,
            )
    spacings = np.diff(ordered, axis=1, prepend=0.0)
    return SpacingsMatrix(spacings)


def stage_exposures(spec: ModelSpec, t: SpacingsMatrix) -> np.ndarray:
    """Elementwise exposures y_ij for the ssk model.

    y_ij = (k-j+1) * t_ij through stage s and (k-j+1)/2 * t_ij^2 afterwards;
    multiplying by lambda_{j-1} * theta gives the hazard integrated over
    stage j across all survivors. In both phases y_ij is exponentially
    distributed with rate lambda_{j-1} * theta, which is what collapses the
    two estimating regimes into one.
    """
    if spec.kind is not ModelKind.SSK:
        raise ModelMismatch("stage exposures are defined for the ssk model only")
    _check_dims(spec, t)
    weights = np.arange(spec.k, 0, -1, dtype=float)
    constant = weights * t.data
    accelerating = 0.5 * weights * t.data**2
    return np.concatenate((constant[:, : spec.s], accelerating[:, spec.s :]), axis=1)


def log_likelihood(spec: ModelSpec, params: Params, t: SpacingsMatrix) -> float:
    """Exact log-likelihood of the spacings under the given model.

    Includes the n*log(k!) ordering constant and, for ssk, the
    sum-of-log-spacings term from the accelerating phase, so the value is a
    true log-density, directly comparable across implementations.
    """
    _check_dims(spec, t, params)
    n, k = t.n, t.k
    totals = _stage_totals(spec, t)
    lam_full = np.empty(k)
    lam_full[0] = 1.0
    lam_full[1:] = params.lambdas
    # fsum keeps the accumulation error at one rounding of the total, which
    # matters to value-only consumers resolving tiny likelihood differences.
    terms = [
        n * _log_factorial(k),
        n * k * math.log(params.theta),
        n * math.fsum(math.log(l) for l in params.lambdas),
        -params.theta * float(totals @ lam_full),
    ]
    if spec.kind is ModelKind.SSK:
        terms.append(float(t._column_log_sums[spec.s :].sum()))
    return math.fsum(terms)


def score(spec: ModelSpec, params: Params, t: SpacingsMatrix) -> np.ndarray:
    """Gradient of the log-likelihood in (theta, lambda_1, ..., lambda_{k-1}).

    Component 0 is d logL / d theta; component j is d logL / d lambda_j.
    Zero at the maximum likelihood estimate.
    """
    _check_dims(spec, t, params)
    n, k = t.n, t.k
    totals = _stage_totals(spec, t)
    lam_full = np.empty(k)
    lam_full[0] = 1.0
    lam_full[1:] = params.lambdas
    grad = np.empty(k)
    grad[0] = n * k / params.theta - float(totals @ lam_full)
    grad[1:] = n / lam_full[1:] - params.theta * totals[1:]
    return grad
