import math

import numpy as np
import pytest

from drakelimit.errors import ValidationFailure
from drakelimit.models import DrakeScenario, ExpectationModel, FactorSpec, LogNormalPrior
from drakelimit.services.drake_model import (
    LogProduct,
    draw_n_civ,
    draw_n_civ_batch,
    expectation,
    scale_between,
    scale_to_universe,
    star_ratio,
    reference_factors,
    reference_scenario,
)
from drakelimit.services.mc_engine import chunk_layout, chunk_rng
from drakelimit.services.priors import quantile


def test_identity_product(fixed_scenario):
    result = draw_n_civ(fixed_scenario(1, 1, 1, 1, 1, 1, 1), chunk_rng(0, 0))
    assert result.linear == 1.0
    assert result.log_value == 0.0


def test_fixed_product_matches_exact_arithmetic(fixed_scenario):
    values = (10, 0.5, 0.5, 1e-40, 0.01, 0.1, 1e4)
    result = draw_n_civ(fixed_scenario(*values), chunk_rng(0, 0))
    assert result.linear == pytest.approx(2.5e-39, rel=1e-12)
    assert result.linear == pytest.approx(math.prod(values), rel=1e-12)


def test_log_and_linear_products_agree(fixed_scenario):
    rng = np.random.default_rng(99)
    for _ in range(200):
        values = 10.0 ** rng.uniform(-30, 10, size=5)
        result = draw_n_civ(fixed_scenario(*values), chunk_rng(0, 0))
        assert result.linear == pytest.approx(math.prod(values), rel=1e-12)


def test_underflowing_product_stays_finite_in_log_domain(fixed_scenario):
    result = draw_n_civ(fixed_scenario(1e-200, 1e-200, 1e-50), chunk_rng(0, 0))
    assert result.linear == 0.0
    assert not result.is_zero
    assert result.log10 == pytest.approx(-450.0)


def test_zero_factor_is_zero_product(fixed_scenario):
    result = draw_n_civ(fixed_scenario(3.0, 0.0, 1e-300), chunk_rng(0, 0))
    assert result.is_zero
    assert result.linear == 0.0
    assert result.log_value == -math.inf


def test_component_medians_locate_the_bulk():
    # log10 of the summed per-factor medians
    total = sum(math.log10(quantile(f.prior, 0.5)) for f in reference_factors())
    assert total == pytest.approx(3.4, abs=0.3)


@pytest.mark.slow
def test_reference_draws_never_nan():
    scenario = reference_scenario(n_samples=10_000_000, seed=42)
    medians = []
    for chunk_index, size in chunk_layout(scenario.n_samples):
        logs = draw_n_civ_batch(scenario, chunk_rng(scenario.seed, chunk_index), size)
        assert not np.isnan(logs).any(), f"chunk {chunk_index}"
        assert np.isfinite(logs).all(), f"chunk {chunk_index}"
        medians.append(np.median(logs))
    # bulk between the two prediction camps
    assert -5 < np.median(medians) / math.log(10) < 5


def test_batch_matches_single_draw(reference):
    single = draw_n_civ(reference, chunk_rng(5, 3))
    batch = draw_n_civ_batch(reference, chunk_rng(5, 3), 1)
    assert single.log_value == batch[0]


# ──────────────────────────────────────────────────────────────────────────────
# Scaling
# ──────────────────────────────────────────────────────────────────────────────


def test_default_star_ratio(reference):
    assert star_ratio(reference) == pytest.approx(6.667e10, rel=1e-4)


def test_scale_to_universe_alone_threshold(reference):
    assert scale_to_universe(1.5e-11, reference) == pytest.approx(1.0, rel=1e-12)
    assert scale_to_universe(0.0, reference) == 0.0
    assert scale_to_universe(7.694e-13, reference) == pytest.approx(0.05129, rel=1e-3)


def test_scale_to_universe_log_domain(reference):
    scaled = scale_to_universe(LogProduct.from_linear(1.5e-11), reference)
    assert isinstance(scaled, LogProduct)
    assert scaled.linear == pytest.approx(1.0, rel=1e-12)
    assert scale_to_universe(LogProduct(-math.inf), reference).is_zero


@pytest.mark.parametrize("a", [0.0, 0.5, 3.0, 1e8])
@pytest.mark.parametrize("x", [0.0, 1e-20, 2.0])
def test_scale_to_universe_is_linear(reference, a, x):
    assert scale_to_universe(a * x, reference) == pytest.approx(a * scale_to_universe(x, reference))


def test_scale_between_rejects_negative():
    with pytest.raises(ValidationFailure):
        scale_between(-1.0, 1.0, 2.0)


def test_scenario_rejects_universe_smaller_than_galaxy():
    with pytest.raises(ValueError):
        DrakeScenario(
            factors=reference_factors(), stars_galaxy=1e12, stars_universe=1e11, n_samples=1, seed=0,
        )


def test_scenario_rejects_unbounded_fraction():
    with pytest.raises(ValueError, match="fraction"):
        DrakeScenario(
            factors=[FactorSpec(name="f", prior=LogNormalPrior(mu_ln=0, sigma_ln=1), is_fraction=True)],
            n_samples=1,
            seed=0,
        )


def test_scenario_rejects_duplicate_names():
    factors = reference_factors()
    with pytest.raises(ValueError, match="unique"):
        DrakeScenario(factors=factors + factors[:1], n_samples=1, seed=0)


# ──────────────────────────────────────────────────────────────────────────────
# Expectation (count form)
# ──────────────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize(
    ("n_habitable", "p_life", "expected"),
    [(4e21, 2.5e-24, 0.01), (1, 1, 1.0), (1e9, 0, 0.0)],
)
def test_expectation(n_habitable, p_life, expected):
    model = ExpectationModel(n_habitable=n_habitable, p_life=p_life)
    assert expectation(model) == pytest.approx(expected, rel=1e-12)
