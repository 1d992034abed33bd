"""Drake product in log space, and rescaling between star populations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import overload

import numpy as np

from drakelimit.config import settings
from drakelimit.errors import ValidationFailure
from drakelimit.models import (
    DrakeScenario,
    ExpectationModel,
    FactorSpec,
    LifeRatePrior,
    LogNormalPrior,
    LogUniformPrior,
)
from drakelimit.services.priors import sample_log

LOG_ZERO = float("-inf")
_LN10 = math.log(10.0)


@dataclass(frozen=True)
class LogProduct:
    """A non-negative value carried as its natural logarithm.

    ``log_value`` is −inf for a zero product. ``linear`` is a view and is 0.0
    when the value is below the double-precision range.
    """

    log_value: float

    @classmethod
    def from_linear(cls, value: float) -> "LogProduct":
        if value < 0:
            raise ValidationFailure(f"value: {value!r} must be >= 0")
        return cls(math.log(value) if value > 0 else LOG_ZERO)

    @property
    def is_zero(self) -> bool:
        return self.log_value == LOG_ZERO

    @property
    def linear(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    @property
    def log10(self) -> float:
        return self.log_value / _LN10


# ──────────────────────────────────────────────────────────────────────────────
# Drawing n_civ
# ──────────────────────────────────────────────────────────────────────────────


def draw_n_civ_batch(
    scenario: DrakeScenario,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """Natural-log products of ``size`` independent draws.

    Factors are drawn in scenario order, one batch per factor, and summed in
    log space. Zero factors give −inf, never NaN.
    """
    total = np.zeros(size)
    for factor in scenario.factors:
        total += sample_log(factor.prior, rng, size)
    return total


def draw_n_civ(scenario: DrakeScenario, rng: np.random.Generator) -> LogProduct:
    """One draw of the Drake product."""
    return LogProduct(float(draw_n_civ_batch(scenario, rng, 1)[0]))


def expectation(model: ExpectationModel) -> float:
    """n = N_H · p_L."""
    return model.n_habitable * model.p_life


# ──────────────────────────────────────────────────────────────────────────────
# Star-count scaling
# ──────────────────────────────────────────────────────────────────────────────


def star_ratio(scenario: DrakeScenario) -> float:
    return scenario.stars_universe / scenario.stars_galaxy


@overload
def scale_between(n: float, stars_from: float, stars_to: float) -> float: ...
@overload
def scale_between(n: LogProduct, stars_from: float, stars_to: float) -> LogProduct: ...


def scale_between(n, stars_from, stars_to):
    """Rescale an expectation from one star population to another.

    Assumes the same per-planet probability in both populations, so the
    expectation scales with the star count.
    """
    if stars_from <= 0 or stars_to <= 0:
        raise ValidationFailure("stars: star counts must be > 0")
    if isinstance(n, LogProduct):
        return LogProduct(n.log_value + math.log(stars_to) - math.log(stars_from))
    if n < 0:
        raise ValidationFailure(f"n: {n!r} must be >= 0")
    return n * (stars_to / stars_from)


@overload
def scale_to_universe(n_g: float, scenario: DrakeScenario) -> float: ...
@overload
def scale_to_universe(n_g: LogProduct, scenario: DrakeScenario) -> LogProduct: ...


def scale_to_universe(n_g, scenario):
    """Galaxy expectation → observable-universe expectation."""
    return scale_between(n_g, scenario.stars_galaxy, scenario.stars_universe)


# ──────────────────────────────────────────────────────────────────────────────
# Reference scenario
# ──────────────────────────────────────────────────────────────────────────────


def reference_factors() -> list[FactorSpec]:
    """Factor priors of the reference reestimate, in Drake order."""
    return [
        FactorSpec(name="R_star", prior=LogUniformPrior(lo=1, hi=100)),
        FactorSpec(name="f_p", prior=LogUniformPrior(lo=0.1, hi=1), is_fraction=True),
        FactorSpec(name="n_e", prior=LogUniformPrior(lo=0.1, hi=1)),
        FactorSpec(
            name="f_l",
            prior=LifeRatePrior(rate_prior=LogNormalPrior(mu_ln=1, sigma_ln=50)),
            is_fraction=True,
        ),
        FactorSpec(name="f_i", prior=LogUniformPrior(lo=0.001, hi=1), is_fraction=True),
        FactorSpec(name="f_c", prior=LogUniformPrior(lo=0.01, hi=1), is_fraction=True),
        FactorSpec(name="L", prior=LogUniformPrior(lo=1e2, hi=1e10)),
    ]


def reference_scenario(n_samples: int = 1_000_000, seed: int = 42) -> DrakeScenario:
    return DrakeScenario(
        factors=reference_factors(),
        stars_galaxy=settings.DEFAULT_STARS_GALAXY,
        stars_universe=settings.DEFAULT_STARS_UNIVERSE,
        n_samples=n_samples,
        seed=seed,
    )
