"""Per-factor prior distributions: validation, sampling and quantiles."""

from __future__ import annotations

import math
from collections.abc import Mapping
from typing import Any

import numpy as np
from pydantic import TypeAdapter, ValidationError
from scipy.special import ndtri

from drakelimit.errors import ValidationFailure
from drakelimit.models import (
    FixedPrior,
    LifeRatePrior,
    LogNormalPrior,
    LogUniformPrior,
    PriorSpec,
)

_PRIOR_ADAPTER: TypeAdapter[PriorSpec] = TypeAdapter(PriorSpec)

# Below this natural-log rate, 1 − e^(−x) is x(1 − x/2) to double precision.
_LOG_RATE_LINEAR = -30.0


# ──────────────────────────────────────────────────────────────────────────────
# Validation
# ──────────────────────────────────────────────────────────────────────────────


def validate(spec: PriorSpec | Mapping[str, Any]) -> PriorSpec:
    """Return a validated prior or raise ValidationFailure.

    Accepts either a model instance (revalidated from its dump, so instances
    built with ``model_construct`` are checked too) or a raw mapping as read
    from a scenario file.
    """
    data = spec.model_dump() if hasattr(spec, "model_dump") else spec
    try:
        return _PRIOR_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise ValidationFailure.from_pydantic(exc) from exc


def support(spec: PriorSpec) -> tuple[float, float]:
    """Closed support bounds of the sampled factor."""
    if isinstance(spec, LogUniformPrior):
        return spec.lo, spec.hi
    if isinstance(spec, LogNormalPrior):
        return 0.0, math.inf
    if isinstance(spec, FixedPrior):
        return spec.value, spec.value
    if isinstance(spec, LifeRatePrior):
        low, high = support(spec.rate_prior)
        return -math.expm1(-low), -math.expm1(-high)
    raise ValidationFailure(f"kind: unknown prior {spec!r}")


def describe(spec: PriorSpec) -> str:
    """Short human-readable label for a prior."""
    if isinstance(spec, LogUniformPrior):
        return f"LogUniform({spec.lo:g}, {spec.hi:g})"
    if isinstance(spec, LogNormalPrior):
        return f"LogNormal({spec.mu_ln:g}, {spec.sigma_ln:g})"
    if isinstance(spec, FixedPrior):
        return f"Fixed({spec.value:g})"
    return f"1 - exp(-x), x ~ {describe(spec.rate_prior)}"


# ──────────────────────────────────────────────────────────────────────────────
# Sampling
# ──────────────────────────────────────────────────────────────────────────────


def log_one_minus_exp(log_x: np.ndarray | float) -> np.ndarray:
    """ln(1 − e^(−x)) given ln x, without underflow for tiny x.

    Large rates saturate to 0; rates far below the double range keep their
    log-domain value (ln x − x/2 + ...).
    """
    log_x = np.asarray(log_x, dtype=float)
    out = np.empty_like(log_x)
    small = log_x < _LOG_RATE_LINEAR
    out[small] = log_x[small] - 0.5 * np.exp(log_x[small])
    big = ~small
    with np.errstate(over="ignore", divide="ignore"):
        x = np.exp(log_x[big])
        out[big] = np.log(-np.expm1(-x))
    return out


def sample_log(spec: PriorSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` values and return their natural logarithms."""
    if isinstance(spec, LogUniformPrior):
        return rng.uniform(math.log(spec.lo), math.log(spec.hi), size)
    if isinstance(spec, LogNormalPrior):
        return spec.mu_ln + spec.sigma_ln * rng.standard_normal(size)
    if isinstance(spec, FixedPrior):
        log_value = math.log(spec.value) if spec.value > 0 else -math.inf
        return np.full(size, log_value)
    if isinstance(spec, LifeRatePrior):
        return log_one_minus_exp(sample_log(spec.rate_prior, rng, size))
    raise ValidationFailure(f"kind: unknown prior {spec!r}")


def sample(
    spec: PriorSpec,
    rng: np.random.Generator,
    size: int | None = None,
) -> float | np.ndarray:
    """Draw from the prior; one float when ``size`` is None.

    Fixed and life_rate values are computed directly rather than through the
    log domain, so 1 − e^(−x) for x = 1e−30 comes back as 1e−30.
    """
    n = 1 if size is None else size
    if isinstance(spec, FixedPrior):
        draws = np.full(n, spec.value)
    elif isinstance(spec, LifeRatePrior):
        rates = sample(spec.rate_prior, rng, n)
        draws = -np.expm1(-np.asarray(rates))
    elif isinstance(spec, LogUniformPrior):
        # exp(log hi) may round one ulp past hi
        draws = np.clip(np.exp(sample_log(spec, rng, n)), spec.lo, spec.hi)
    else:
        with np.errstate(over="ignore", under="ignore"):
            draws = np.exp(sample_log(spec, rng, n))
    return float(draws[0]) if size is None else draws


# ──────────────────────────────────────────────────────────────────────────────
# Quantiles
# ──────────────────────────────────────────────────────────────────────────────


def quantile(spec: PriorSpec, q: float) -> float:
    """Inverse CDF of the prior at ``q`` ∈ [0, 1]."""
    if not 0.0 <= q <= 1.0:
        raise ValidationFailure(f"q: {q!r} outside [0, 1]")
    if isinstance(spec, LogUniformPrior):
        log_lo, log_hi = math.log(spec.lo), math.log(spec.hi)
        return math.exp(log_lo + q * (log_hi - log_lo))
    if isinstance(spec, LogNormalPrior):
        z = float(ndtri(q))
        if math.isinf(z):
            return 0.0 if z < 0 else math.inf
        return math.exp(spec.mu_ln + spec.sigma_ln * z)
    if isinstance(spec, FixedPrior):
        return spec.value
    if isinstance(spec, LifeRatePrior):
        return -math.expm1(-quantile(spec.rate_prior, q))
    raise ValidationFailure(f"kind: unknown prior {spec!r}")
