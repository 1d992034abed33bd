"""Application configuration."""

from __future__ import annotations

import logging


class Settings:
    # Samples per random substream. Part of the determinism contract:
    # changing it changes every Monte Carlo result.
    CHUNK_SIZE: int = 65536
    DEFAULT_THREADS: int = 1

    DEFAULT_STARS_GALAXY: float = 3e11
    DEFAULT_STARS_UNIVERSE: float = 2e22

    DEFAULT_LOG10_MIN: float = -120.0
    DEFAULT_LOG10_MAX: float = 20.0
    DEFAULT_N_BINS: int = 280
    DEFAULT_QUANTILES: tuple[float, ...] = (0.01, 0.05, 0.16, 0.5, 0.84, 0.95, 0.99)

    DEFAULT_LIMIT_CONFIDENCE: float = 0.95

    CURVE_MIN: float = 1e-3
    CURVE_MAX: float = 1e2
    CURVE_POINTS: int = 101
    CURVE_SPACING: str = "log"

    # Below this expectation the conditional second-event probability
    # switches to its power series.
    SERIES_SWITCHOVER: float = 1e-4
    BISECTION_XTOL: float = 1e-12

    DISPLAY_DIGITS: int = 6
    SCHEMA_VERSION: int = 1

    LOG_FORMAT: str = "%(levelname)s %(name)s: %(message)s"


settings = Settings()


def configure_logging(verbosity: int = 0) -> None:
    """Send library logs to stderr; 0 → WARNING, 1 → INFO, 2+ → DEBUG."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, force=True)
