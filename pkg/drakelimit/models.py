"""Pydantic models for priors, scenarios, limits and run summaries."""

from __future__ import annotations

import math
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from drakelimit.config import settings


# ──────────────────────────────────────────────────────────────────────────────
# Enum-like Literal types
# ──────────────────────────────────────────────────────────────────────────────

PriorKind = Literal["log_uniform", "log_normal", "fixed", "life_rate"]
LimitContext = Literal["universe", "galaxy", "custom"]
CurveSpacing = Literal["linear", "log"]

_UINT64_MAX = 2**64 - 1


class _Model(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ──────────────────────────────────────────────────────────────────────────────
# Priors
# ──────────────────────────────────────────────────────────────────────────────


class LogUniformPrior(_Model):
    """Density ∝ 1/x on [lo, hi]."""

    kind: Literal["log_uniform"] = "log_uniform"
    lo: float = Field(gt=0, allow_inf_nan=False)
    hi: float = Field(gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_bounds(self) -> "LogUniformPrior":
        if not self.lo < self.hi:
            raise ValueError(f"lo < hi violated (lo={self.lo!r}, hi={self.hi!r})")
        return self


class LogNormalPrior(_Model):
    """Natural log of the variate ~ Normal(mu_ln, sigma_ln²)."""

    kind: Literal["log_normal"] = "log_normal"
    mu_ln: float = Field(allow_inf_nan=False)
    sigma_ln: float = Field(gt=0, allow_inf_nan=False)


class FixedPrior(_Model):
    kind: Literal["fixed"] = "fixed"
    value: float = Field(ge=0, allow_inf_nan=False)


class LifeRatePrior(_Model):
    """The sampled factor is 1 − e^(−x) with x drawn from ``rate_prior``."""

    kind: Literal["life_rate"] = "life_rate"
    rate_prior: PriorSpec

    @field_validator("rate_prior")
    @classmethod
    def _no_nesting(cls, value: "PriorSpec") -> "PriorSpec":
        if isinstance(value, LifeRatePrior):
            raise ValueError("life_rate priors cannot be nested")
        return value


PriorSpec = Annotated[
    Union[LogUniformPrior, LogNormalPrior, FixedPrior, LifeRatePrior],
    Field(discriminator="kind"),
]

LifeRatePrior.model_rebuild()


# ──────────────────────────────────────────────────────────────────────────────
# Scenario
# ──────────────────────────────────────────────────────────────────────────────


class FactorSpec(_Model):
    name: str = Field(min_length=1)
    prior: PriorSpec
    is_fraction: bool = False


class HistogramSpec(_Model):
    log10_min: float = Field(default=settings.DEFAULT_LOG10_MIN, allow_inf_nan=False)
    log10_max: float = Field(default=settings.DEFAULT_LOG10_MAX, allow_inf_nan=False)
    n_bins: int = Field(default=settings.DEFAULT_N_BINS, ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "HistogramSpec":
        if not self.log10_min < self.log10_max:
            raise ValueError(
                f"log10_min < log10_max violated ({self.log10_min!r} >= {self.log10_max!r})"
            )
        return self

    @property
    def bin_width(self) -> float:
        return (self.log10_max - self.log10_min) / self.n_bins

    def edges(self) -> list[float]:
        """Bin edges, n_bins + 1 values from log10_min to log10_max."""
        width = self.bin_width
        return [self.log10_min + i * width for i in range(self.n_bins)] + [self.log10_max]


class DrakeScenario(_Model):
    factors: list[FactorSpec]
    stars_galaxy: float = Field(default=settings.DEFAULT_STARS_GALAXY, gt=0, allow_inf_nan=False)
    stars_universe: float = Field(default=settings.DEFAULT_STARS_UNIVERSE, gt=0, allow_inf_nan=False)
    n_samples: int = Field(ge=1)
    seed: int = Field(ge=0, le=_UINT64_MAX)
    histogram: HistogramSpec = Field(default_factory=HistogramSpec)

    @field_validator("factors")
    @classmethod
    def _check_factors(cls, value: list[FactorSpec]) -> list[FactorSpec]:
        if not value:
            raise ValueError("at least one factor is required")
        names = [factor.name for factor in value]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"factor names must be unique (duplicated: {', '.join(duplicates)})")

        from drakelimit.services.priors import support

        for factor in value:
            if not factor.is_fraction:
                continue
            low, high = support(factor.prior)
            if low < 0 or high > 1:
                raise ValueError(
                    f"factor {factor.name!r} is a fraction but its prior support "
                    f"[{low!r}, {high!r}] is not within [0, 1]"
                )
        return value

    @model_validator(mode="after")
    def _check_stars(self) -> "DrakeScenario":
        if self.stars_universe < self.stars_galaxy:
            raise ValueError(
                f"stars_universe >= stars_galaxy violated "
                f"({self.stars_universe!r} < {self.stars_galaxy!r})"
            )
        return self


class ExpectationModel(_Model):
    """Count form of the Drake estimate: n = N_H · p_L."""

    n_habitable: float = Field(gt=0, allow_inf_nan=False)
    p_life: float = Field(ge=0, le=1)


class PlanetClass(_Model):
    n_habitable: float = Field(gt=0, allow_inf_nan=False)
    p_life: float = Field(ge=0, le=1)


# ──────────────────────────────────────────────────────────────────────────────
# Results
# ──────────────────────────────────────────────────────────────────────────────


class LimitResult(_Model):
    """Lower limit on an expectation value at a given confidence level.

    ``star_ratio`` is the factor applied to the universe-level limit to reach
    this context (1 for the universe itself).
    """

    confidence: float = Field(gt=0, lt=1)
    n_lower: float = Field(gt=0)
    context: LimitContext = "universe"
    star_ratio: float = Field(default=1.0, gt=0)
    label: str | None = None


class RunSummary(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", ser_json_inf_nan="constants")

    n_samples: int = Field(ge=0)
    seed: int = Field(ge=0, le=_UINT64_MAX)
    n_zero: int = 0

    log10_min: float
    log10_max: float
    n_bins: int
    histogram: list[int]
    underflow: int = 0
    overflow: int = 0

    limit_confidence: float
    threshold_alone_galaxy: float
    threshold_alone_universe: float
    threshold_limit: float

    frac_alone_galaxy: float = Field(ge=0, le=1)
    frac_alone_universe: float = Field(ge=0, le=1)
    frac_below_limit: float = Field(ge=0, le=1)
    frac_alone_galaxy_truncated: float = Field(ge=0, le=1)
    frac_alone_universe_truncated: float = Field(ge=0, le=1)
    frac_not_alone_universe_truncated: float = Field(ge=0, le=1)

    quantiles: list[tuple[float, float]] = Field(default_factory=list)

    @property
    def total_count(self) -> int:
        return sum(self.histogram) + self.underflow + self.overflow


class OutputPaths(_Model):
    summary: str | None = Field(default=None, min_length=1)
    histogram: str | None = Field(default=None, min_length=1)
    curve: str | None = Field(default=None, min_length=1)
    raw_samples: str | None = Field(default=None, min_length=1)


class ScenarioFile(_Model):
    schema_version: int
    scenario: DrakeScenario
    limits: list[float] = Field(default_factory=lambda: [settings.DEFAULT_LIMIT_CONFIDENCE])
    outputs: OutputPaths = Field(default_factory=OutputPaths)

    @field_validator("schema_version")
    @classmethod
    def _supported_version(cls, value: int) -> int:
        if value != settings.SCHEMA_VERSION:
            raise ValueError(
                f"unsupported schema_version {value} (supported: {settings.SCHEMA_VERSION})"
            )
        return value

    @field_validator("limits")
    @classmethod
    def _confidences_in_range(cls, value: list[float]) -> list[float]:
        for confidence in value:
            if not (0 < confidence < 1) or math.isnan(confidence):
                raise ValueError(f"confidence {confidence!r} outside (0, 1)")
        return value


class ToolInfo(_Model):
    name: str
    version: str


class SummaryDocument(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", ser_json_inf_nan="constants")

    tool: ToolInfo
    generated_at: str | None = None
    scenario: DrakeScenario
    summary: RunSummary
    limits: list[LimitResult] = Field(default_factory=list)
    display: dict[str, str] = Field(default_factory=dict)
