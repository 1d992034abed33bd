import math

import numpy as np
import pytest

from drakelimit.errors import ValidationFailure
from drakelimit.models import HistogramSpec
from drakelimit.services.mc_engine import (
    Accumulator,
    Thresholds,
    chunk_layout,
    fraction_below,
    histogram_counts,
    run,
    run_stream,
    truncated_fraction,
)

CHUNK = 10_000


# ──────────────────────────────────────────────────────────────────────────────
# Chunking
# ──────────────────────────────────────────────────────────────────────────────


def test_chunk_layout_covers_all_samples():
    assert chunk_layout(10, 4) == [(0, 4), (1, 4), (2, 2)]
    assert chunk_layout(8, 4) == [(0, 4), (1, 4)]
    assert chunk_layout(3, 100) == [(0, 3)]


def test_chunk_layout_rejects_empty_run():
    with pytest.raises(ValidationFailure):
        chunk_layout(0)


def test_run_rejects_zero_threads(reference):
    with pytest.raises(ValidationFailure):
        run(reference, threads=0)


# ──────────────────────────────────────────────────────────────────────────────
# Histogram and accumulation
# ──────────────────────────────────────────────────────────────────────────────


def test_histogram_counts_edges_and_tails():
    spec = HistogramSpec(log10_min=0.0, log10_max=4.0, n_bins=4)
    values = np.array([-np.inf, -0.5, 0.0, 0.99, 1.0, 3.999, 4.0, 12.0])
    counts, underflow, overflow = histogram_counts(values, spec)
    assert counts.tolist() == [2, 1, 0, 1]
    assert underflow == 2
    assert overflow == 2


def test_accumulator_merge_is_associative():
    spec = HistogramSpec(log10_min=-5.0, log10_max=5.0, n_bins=10)
    thresholds = Thresholds(alone_galaxy=0.0, alone_universe=-2.0, limit=-3.0, limit_confidence=0.95)
    rng = np.random.default_rng(1)
    parts = [
        Accumulator.from_values(rng.normal(0, 4, size), spec, thresholds) for size in (50, 70, 30)
    ]
    left = parts[0].merge(parts[1]).merge(parts[2])
    right = parts[0].merge(parts[1].merge(parts[2]))
    assert left.counts.tolist() == right.counts.tolist()
    assert left.n_samples == right.n_samples == 150
    assert left.below_limit == right.below_limit
    assert int(left.counts.sum()) + left.underflow + left.overflow == 150


def test_degenerate_scenario_fills_single_bin(fixed_scenario):
    summary = run(fixed_scenario(1, 1, 1, 1, 1, 1, 1, n_samples=5000))
    assert summary.histogram[240] == 5000
    assert summary.total_count == 5000
    assert sum(summary.histogram) == 5000
    assert summary.frac_alone_galaxy == 0.0
    assert summary.frac_below_limit == 0.0
    assert summary.n_zero == 0


def test_zero_products_are_counted_as_underflow(fixed_scenario):
    summary = run(fixed_scenario(1, 0, n_samples=100))
    assert summary.n_zero == 100
    assert summary.underflow == 100
    assert summary.frac_alone_galaxy == 1.0
    assert summary.frac_below_limit == 1.0
    assert summary.frac_alone_galaxy_truncated == 0.0


def test_histogram_conserves_samples(reference):
    summary = run(reference)
    assert summary.total_count == reference.n_samples
    assert len(summary.histogram) == reference.histogram.n_bins


# ──────────────────────────────────────────────────────────────────────────────
# Fractions
# ──────────────────────────────────────────────────────────────────────────────


def test_determinism_across_thread_counts(reference):
    single, stream_one = run_stream(reference, threads=1, chunk_size=CHUNK)
    pooled, stream_four = run_stream(reference, threads=4, chunk_size=CHUNK)
    assert single == pooled
    np.testing.assert_array_equal(stream_one.values, stream_four.values)


def test_same_seed_same_summary(reference):
    assert run(reference) == run(reference)


def test_truncation_identity(reference):
    summary = run(reference)
    fb = summary.frac_below_limit
    assert summary.threshold_limit <= summary.threshold_alone_universe
    assert summary.frac_alone_galaxy_truncated == (summary.frac_alone_galaxy - fb) / (1 - fb)
    assert summary.frac_alone_universe_truncated == (summary.frac_alone_universe - fb) / (1 - fb)
    assert summary.frac_not_alone_universe_truncated == 1 - summary.frac_alone_universe_truncated


def test_thresholds_follow_star_counts(reference):
    thresholds = Thresholds.for_scenario(reference, 0.95)
    assert thresholds.alone_galaxy == 0.0
    assert thresholds.alone_universe == pytest.approx(-math.log10(2e22 / 3e11))
    assert thresholds.limit == pytest.approx(math.log10(7.69399e-13), abs=1e-5)


def test_fraction_below_is_monotone(reference):
    summary, stream = run_stream(reference, chunk_size=CHUNK)
    grid = np.linspace(-60, 20, 161)
    fractions = [stream.fraction_below(t) for t in grid]
    assert fractions == sorted(fractions)
    assert fraction_below(stream, -math.inf) == 0.0
    assert fraction_below(stream, math.inf) == 1.0
    assert stream.fraction_below(0.0) == summary.frac_alone_galaxy
    assert stream.fraction_below(summary.threshold_limit) == summary.frac_below_limit


def test_fraction_below_rejects_nan():
    with pytest.raises(ValidationFailure):
        fraction_below(np.array([0.0, 1.0]), math.nan)


def test_truncated_fraction_when_limit_above_alone():
    assert truncated_fraction(0.3, 0.5, alone_above_limit=False) == 0.0
    assert truncated_fraction(1.0, 1.0, alone_above_limit=True) == 0.0
    assert truncated_fraction(0.5, 0.25, alone_above_limit=True) == pytest.approx(1 / 3)


def test_quantiles_are_ordered(reference):
    summary = run(reference)
    levels = [q for q, _ in summary.quantiles]
    values = [v for _, v in summary.quantiles]
    assert levels == sorted(levels)
    assert values == sorted(values)


# ──────────────────────────────────────────────────────────────────────────────
# Reference priors at full size
# ──────────────────────────────────────────────────────────────────────────────


@pytest.mark.slow
def test_reference_fractions():
    from drakelimit.services.drake_model import reference_scenario

    summary = run(reference_scenario(n_samples=1_000_000, seed=42), threads=4)
    assert 0.43 <= summary.frac_alone_galaxy <= 0.53
    assert 0.21 <= summary.frac_alone_universe <= 0.31
    assert 0.27 <= summary.frac_alone_galaxy_truncated <= 0.37
    assert 0.014 <= summary.frac_alone_universe_truncated <= 0.034
    assert 0.18 <= summary.frac_below_limit <= 0.28
    assert summary.frac_alone_universe <= summary.frac_alone_galaxy


@pytest.mark.slow
def test_reference_fractions_stable_across_seeds():
    from drakelimit.services.drake_model import reference_scenario

    first = run(reference_scenario(n_samples=1_000_000, seed=1), threads=4)
    second = run(reference_scenario(n_samples=1_000_000, seed=2), threads=4)
    for field in (
        "frac_alone_galaxy",
        "frac_alone_universe",
        "frac_below_limit",
        "frac_alone_galaxy_truncated",
        "frac_alone_universe_truncated",
    ):
        assert abs(getattr(first, field) - getattr(second, field)) < 0.005, field


@pytest.mark.slow
def test_reference_histogram_shape():
    from drakelimit.services.drake_model import reference_scenario

    scenario = reference_scenario(n_samples=10_000_000, seed=42)
    summary = run(scenario, threads=4)
    edges = scenario.histogram.edges()
    mode = int(np.argmax(summary.histogram))
    assert 0.0 <= edges[mode] <= 8.0
    # long pessimistic tail
    below_minus_100 = sum(c for c, lo in zip(summary.histogram, edges) if lo < -100) + summary.underflow
    assert below_minus_100 > 0
