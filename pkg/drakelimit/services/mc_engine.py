"""Monte Carlo run over a Drake scenario.

The sample index space is cut into fixed-size chunks. Chunk ``i`` draws from
its own PCG64 stream seeded by ``SeedSequence((seed, i))`` and chunks are
merged in index order, so results do not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from drakelimit.config import settings
from drakelimit.errors import ValidationFailure
from drakelimit.models import DrakeScenario, HistogramSpec, RunSummary
from drakelimit.services.counting_stats import lower_limit, scale_limit_to_galaxy
from drakelimit.services.drake_model import draw_n_civ_batch, star_ratio

logger = logging.getLogger(__name__)

_LN10 = math.log(10.0)


# ──────────────────────────────────────────────────────────────────────────────
# Chunked random substreams
# ──────────────────────────────────────────────────────────────────────────────


def chunk_layout(n_samples: int, chunk_size: int = settings.CHUNK_SIZE) -> list[tuple[int, int]]:
    """(chunk_index, chunk_length) pairs covering ``n_samples`` draws."""
    if n_samples < 1:
        raise ValidationFailure(f"n_samples: {n_samples!r} must be >= 1")
    if chunk_size < 1:
        raise ValidationFailure(f"chunk_size: {chunk_size!r} must be >= 1")
    full, rest = divmod(n_samples, chunk_size)
    layout = [(i, chunk_size) for i in range(full)]
    if rest:
        layout.append((full, rest))
    return layout


def chunk_rng(seed: int, chunk_index: int) -> Generator:
    return Generator(PCG64(SeedSequence((seed, chunk_index))))


def draw_log10_chunk(scenario: DrakeScenario, chunk_index: int, size: int) -> np.ndarray:
    """log10(n_g) for one chunk of the run."""
    rng = chunk_rng(scenario.seed, chunk_index)
    return draw_n_civ_batch(scenario, rng, size) / _LN10


# ──────────────────────────────────────────────────────────────────────────────
# Thresholds
# ──────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Thresholds:
    """log10(n_g) thresholds; a sample counts when strictly below."""

    alone_galaxy: float
    alone_universe: float
    limit: float
    limit_confidence: float

    @classmethod
    def for_scenario(cls, scenario: DrakeScenario, limit_confidence: float) -> "Thresholds":
        limit = scale_limit_to_galaxy(
            lower_limit(limit_confidence), scenario.stars_galaxy, scenario.stars_universe,
        )
        return cls(
            alone_galaxy=0.0,
            alone_universe=-math.log10(star_ratio(scenario)),
            limit=math.log10(limit.n_lower),
            limit_confidence=limit_confidence,
        )


# ──────────────────────────────────────────────────────────────────────────────
# Accumulation
# ──────────────────────────────────────────────────────────────────────────────


def histogram_counts(values: np.ndarray, spec: HistogramSpec) -> tuple[np.ndarray, int, int]:
    """Bin counts over [log10_min, log10_max) plus underflow and overflow."""
    underflow_mask = values < spec.log10_min
    overflow_mask = values >= spec.log10_max
    inside = values[~(underflow_mask | overflow_mask)]
    index = np.floor((inside - spec.log10_min) / spec.bin_width).astype(np.int64)
    np.clip(index, 0, spec.n_bins - 1, out=index)
    counts = np.bincount(index, minlength=spec.n_bins)
    return counts, int(underflow_mask.sum()), int(overflow_mask.sum())


@dataclass
class Accumulator:
    """Integer tallies of a set of samples. ``merge`` is associative."""

    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0
    n_samples: int = 0
    n_zero: int = 0
    alone_galaxy: int = 0
    alone_universe: int = 0
    below_limit: int = 0

    @classmethod
    def empty(cls, spec: HistogramSpec) -> "Accumulator":
        return cls(counts=np.zeros(spec.n_bins, dtype=np.int64))

    @classmethod
    def from_values(
        cls, values: np.ndarray, spec: HistogramSpec, thresholds: Thresholds,
    ) -> "Accumulator":
        counts, underflow, overflow = histogram_counts(values, spec)
        return cls(
            counts=counts,
            underflow=underflow,
            overflow=overflow,
            n_samples=int(values.size),
            n_zero=int(np.isneginf(values).sum()),
            alone_galaxy=int((values < thresholds.alone_galaxy).sum()),
            alone_universe=int((values < thresholds.alone_universe).sum()),
            below_limit=int((values < thresholds.limit).sum()),
        )

    def merge(self, other: "Accumulator") -> "Accumulator":
        return Accumulator(
            counts=self.counts + other.counts,
            underflow=self.underflow + other.underflow,
            overflow=self.overflow + other.overflow,
            n_samples=self.n_samples + other.n_samples,
            n_zero=self.n_zero + other.n_zero,
            alone_galaxy=self.alone_galaxy + other.alone_galaxy,
            alone_universe=self.alone_universe + other.alone_universe,
            below_limit=self.below_limit + other.below_limit,
        )


@dataclass(frozen=True)
class SampleStream:
    """All log10(n_g) draws of a run, in chunk order."""

    values: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.values.size)

    def fraction_below(self, log10_threshold: float) -> float:
        return fraction_below(self, log10_threshold)


def fraction_below(stream: SampleStream | np.ndarray, log10_threshold: float) -> float:
    """Exact fraction of drawn samples with log10(n_g) strictly below the threshold."""
    values = stream.values if isinstance(stream, SampleStream) else np.asarray(stream)
    if values.size == 0:
        return 0.0
    if math.isnan(log10_threshold):
        raise ValidationFailure("log10_threshold: must not be NaN")
    return int((values < log10_threshold).sum()) / values.size


def truncated_fraction(frac_alone: float, frac_below: float, alone_above_limit: bool) -> float:
    """Alone-fraction among samples at or above the limit.

    When the limit lies above the alone threshold no surviving sample is
    alone.
    """
    if not alone_above_limit:
        return 0.0
    if frac_below >= 1.0:
        logger.warning("Every sample lies below the limit; truncated fraction set to 0")
        return 0.0
    return (frac_alone - frac_below) / (1.0 - frac_below)


# ──────────────────────────────────────────────────────────────────────────────
# Run
# ──────────────────────────────────────────────────────────────────────────────


def _summarize(
    scenario: DrakeScenario,
    acc: Accumulator,
    thresholds: Thresholds,
    values: np.ndarray,
    quantiles: tuple[float, ...],
) -> RunSummary:
    n = acc.n_samples
    frac_galaxy = acc.alone_galaxy / n
    frac_universe = acc.alone_universe / n
    frac_below = acc.below_limit / n
    truncated_galaxy = truncated_fraction(
        frac_galaxy, frac_below, thresholds.limit <= thresholds.alone_galaxy,
    )
    truncated_universe = truncated_fraction(
        frac_universe, frac_below, thresholds.limit <= thresholds.alone_universe,
    )
    quantile_values = np.quantile(values, quantiles, method="inverted_cdf")
    spec = scenario.histogram
    return RunSummary(
        n_samples=n,
        seed=scenario.seed,
        n_zero=acc.n_zero,
        log10_min=spec.log10_min,
        log10_max=spec.log10_max,
        n_bins=spec.n_bins,
        histogram=[int(c) for c in acc.counts],
        underflow=acc.underflow,
        overflow=acc.overflow,
        limit_confidence=thresholds.limit_confidence,
        threshold_alone_galaxy=thresholds.alone_galaxy,
        threshold_alone_universe=thresholds.alone_universe,
        threshold_limit=thresholds.limit,
        frac_alone_galaxy=frac_galaxy,
        frac_alone_universe=frac_universe,
        frac_below_limit=frac_below,
        frac_alone_galaxy_truncated=truncated_galaxy,
        frac_alone_universe_truncated=truncated_universe,
        frac_not_alone_universe_truncated=1.0 - truncated_universe,
        quantiles=[(float(q), float(v)) for q, v in zip(quantiles, quantile_values)],
    )


def run_stream(
    scenario: DrakeScenario,
    threads: int = settings.DEFAULT_THREADS,
    limit_confidence: float = settings.DEFAULT_LIMIT_CONFIDENCE,
    quantiles: tuple[float, ...] = settings.DEFAULT_QUANTILES,
    chunk_size: int = settings.CHUNK_SIZE,
) -> tuple[RunSummary, SampleStream]:
    """Run the experiment and keep the raw sample stream."""
    if threads < 1:
        raise ValidationFailure(f"threads: {threads!r} must be >= 1")
    thresholds = Thresholds.for_scenario(scenario, limit_confidence)
    layout = chunk_layout(scenario.n_samples, chunk_size)
    logger.info(
        "Sampling %d draws in %d chunks on %d thread(s), seed %d",
        scenario.n_samples, len(layout), threads, scenario.seed,
    )
    started = time.perf_counter()

    def work(item: tuple[int, int]) -> np.ndarray:
        index, size = item
        chunk = draw_log10_chunk(scenario, index, size)
        logger.debug("Chunk %d done (%d draws)", index, size)
        return chunk

    if threads == 1:
        chunks = [work(item) for item in layout]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, layout))

    acc = Accumulator.empty(scenario.histogram)
    for chunk in chunks:
        acc = acc.merge(Accumulator.from_values(chunk, scenario.histogram, thresholds))
    values = np.concatenate(chunks)
    if np.isnan(values).any():
        raise ValidationFailure("scenario: sampling produced NaN products")

    summary = _summarize(scenario, acc, thresholds, values, quantiles)
    logger.info(
        "Run finished in %.2fs: alone(galaxy)=%.4f alone(universe)=%.4f below-limit=%.4f",
        time.perf_counter() - started,
        summary.frac_alone_galaxy, summary.frac_alone_universe, summary.frac_below_limit,
    )
    return summary, SampleStream(values)


def run(
    scenario: DrakeScenario,
    threads: int = settings.DEFAULT_THREADS,
    limit_confidence: float = settings.DEFAULT_LIMIT_CONFIDENCE,
) -> RunSummary:
    summary, _ = run_stream(scenario, threads=threads, limit_confidence=limit_confidence)
    return summary
