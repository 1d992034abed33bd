"""Poisson / binomial counting inference for one observed civilization.

All functions are pure. Small expectations go through expm1/log1p so that
probabilities of order 1e−15 keep full relative precision.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

from pydantic import ValidationError
from scipy.optimize import bisect

from drakelimit.config import settings
from drakelimit.errors import ValidationFailure
from drakelimit.models import LimitContext, LimitResult, PlanetClass
from drakelimit.services.drake_model import LogProduct

logger = logging.getLogger(__name__)


def _check_expectation(n: float) -> None:
    if not math.isfinite(n) or n < 0:
        raise ValidationFailure(f"n_civ: {n!r} must be finite and >= 0")


def _check_confidence(confidence: float) -> None:
    if not 0.0 < confidence < 1.0:
        raise ValidationFailure(f"confidence: {confidence!r} outside (0, 1)")


# ──────────────────────────────────────────────────────────────────────────────
# Occurrence probabilities
# ──────────────────────────────────────────────────────────────────────────────


def p_at_least_one(n_civ: float | LogProduct) -> float:
    """P(n_obs ≥ 1 | n) = 1 − e^(−n).

    A LogProduct expectation is accepted; below the double range the result
    is the expectation itself and underflows the same way. Above it the
    result is 1.
    """
    if isinstance(n_civ, LogProduct):
        if math.isinf(n_civ.linear):
            return 1.0
        n_civ = n_civ.linear
    _check_expectation(n_civ)
    return -math.expm1(-n_civ)


def p_at_least_two(n_civ: float) -> float:
    """P(n_obs ≥ 2 | n) = 1 − (1 + n)e^(−n)."""
    _check_expectation(n_civ)
    return -math.expm1(-n_civ) - n_civ * math.exp(-n_civ)


def p_at_least_one_exact(p_life: float, n_habitable: int) -> float:
    """Binomial form 1 − (1 − p)^N, with the power taken as N·log1p(−p)."""
    if not 0.0 <= p_life <= 1.0:
        raise ValidationFailure(f"p_life: {p_life!r} outside [0, 1]")
    if n_habitable <= 0:
        raise ValidationFailure(f"n_habitable: {n_habitable!r} must be > 0")
    if p_life == 1.0:
        return 1.0
    return -math.expm1(n_habitable * math.log1p(-p_life))


@dataclass(frozen=True)
class ClassOccurrence:
    """P(n_obs ≥ 1) over several planet classes, exact and Poisson forms."""

    exact: float
    poisson: float
    total_expectation: float


def p_at_least_one_classes(classes: Sequence[PlanetClass]) -> ClassOccurrence:
    """1 − ∏(1 − p_i)^N_i, alongside 1 − e^(−Σ N_i p_i)."""
    if not classes:
        raise ValidationFailure("classes: at least one planet class is required")
    log_none = 0.0
    total = 0.0
    for planet_class in classes:
        total += planet_class.n_habitable * planet_class.p_life
        if planet_class.p_life == 1.0:
            log_none = -math.inf
        else:
            log_none += planet_class.n_habitable * math.log1p(-planet_class.p_life)
    return ClassOccurrence(
        exact=-math.expm1(log_none),
        poisson=-math.expm1(-total),
        total_expectation=total,
    )


def p_second_given_first(n_civ: float) -> float:
    """P(n_obs ≥ 2 | n, n_obs ≥ 1) = (1 − (1+n)e^(−n)) / (1 − e^(−n)).

    Tends to n/2 for small n and to 1 for large n. Below the series
    switchover the closed form is 0/0 prone and the series is used instead.
    """
    _check_expectation(n_civ)
    if n_civ == 0.0:
        return 0.0
    if n_civ < settings.SERIES_SWITCHOVER:
        return n_civ / 2.0 - n_civ * n_civ / 12.0
    return p_at_least_two(n_civ) / p_at_least_one(n_civ)


def baseline_consequences(n_civ: float = 1.0) -> tuple[float, float]:
    """(P(≥1), P(≥2 | ≥1)) at a baseline expectation, 63% and 42% for n = 1."""
    return p_at_least_one(n_civ), p_second_given_first(n_civ)


# ──────────────────────────────────────────────────────────────────────────────
# Lower limits
# ──────────────────────────────────────────────────────────────────────────────


def _bisect_limit(confidence: float) -> float:
    """Root of P(n_obs = 0 | n) = confidence by bisection.

    Solved on e^(−n) rather than 1 − e^(−n), which is flat to double precision
    at low confidence.
    """
    high = 1.0
    while math.exp(-high) > confidence:
        high *= 2.0
    return bisect(
        lambda n: math.exp(-n) - confidence,
        0.0,
        high,
        xtol=settings.BISECTION_XTOL,
        rtol=4 * 2.0**-52,
        maxiter=500,
    )


def lower_limit(confidence: float) -> LimitResult:
    """Smallest expectation not excluded by the observation of one event.

    Expectations n with P(n_obs ≥ 1 | n) < 1 − confidence are excluded; the
    boundary is n = −ln(confidence).
    """
    _check_confidence(confidence)
    closed = -math.log(confidence)
    root = _bisect_limit(confidence)
    if abs(root - closed) > settings.BISECTION_XTOL * max(1.0, closed) * 10:
        logger.warning(
            "Limit self-check disagrees at C.L. %s: closed form %r, bisection %r",
            confidence, closed, root,
        )
    else:
        logger.debug("Limit at C.L. %s: %r (bisection %r)", confidence, closed, root)
    return LimitResult(confidence=confidence, n_lower=closed, context="universe", star_ratio=1.0)


def scale_limit(
    limit: LimitResult,
    stars_from: float,
    stars_to: float,
    context: LimitContext = "custom",
    label: str | None = None,
) -> LimitResult:
    """Rescale a limit to another star population (galaxy, cluster, ...)."""
    if stars_from <= 0 or stars_to <= 0:
        raise ValidationFailure("stars: star counts must be > 0")
    ratio = stars_to / stars_from
    try:
        return LimitResult(
            confidence=limit.confidence,
            n_lower=limit.n_lower * ratio,
            context=context,
            star_ratio=limit.star_ratio * ratio,
            label=label,
        )
    except ValidationError as exc:
        raise ValidationFailure.from_pydantic(exc) from exc


def scale_limit_to_galaxy(
    limit: LimitResult,
    stars_galaxy: float = settings.DEFAULT_STARS_GALAXY,
    stars_universe: float = settings.DEFAULT_STARS_UNIVERSE,
) -> LimitResult:
    if not stars_universe >= stars_galaxy > 0:
        raise ValidationFailure(
            f"stars: stars_universe >= stars_galaxy > 0 violated "
            f"({stars_universe!r}, {stars_galaxy!r})"
        )
    return scale_limit(limit, stars_universe, stars_galaxy, context="galaxy")


def per_planet_limit(confidence: float, n_habitable: float) -> float:
    """Lower bound on the per-habitable-planet probability."""
    if not n_habitable > 0:
        raise ValidationFailure(f"n_habitable: {n_habitable!r} must be > 0")
    return min(1.0, lower_limit(confidence).n_lower / n_habitable)


def pessimism_line(n_habitable: float) -> float:
    """Per-planet probability at which the expectation is exactly one."""
    if not n_habitable > 0:
        raise ValidationFailure(f"n_habitable: {n_habitable!r} must be > 0")
    return min(1.0, 1.0 / n_habitable)


def is_excluded(n_civ: float, confidence: float) -> bool:
    """True when the existence of one civilization excludes expectation n."""
    _check_expectation(n_civ)
    return n_civ < lower_limit(confidence).n_lower
