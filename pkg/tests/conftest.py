import json
from pathlib import Path

import pytest

from drakelimit.models import DrakeScenario, FactorSpec, FixedPrior
from drakelimit.services.drake_model import reference_factors, reference_scenario


@pytest.fixture
def reference():
    """Reference priors at a test-friendly sample count."""
    return reference_scenario(n_samples=200_000, seed=42)


@pytest.fixture
def fixed_scenario():
    def build(*values: float, n_samples: int = 1000, seed: int = 7) -> DrakeScenario:
        return DrakeScenario(
            factors=[
                FactorSpec(name=f"f{i}", prior=FixedPrior(value=v)) for i, v in enumerate(values)
            ],
            n_samples=n_samples,
            seed=seed,
        )

    return build


@pytest.fixture
def scenario_file(tmp_path):
    """Write a scenario file and return its path."""

    def write(
        n_samples: int = 20_000,
        seed: int = 42,
        outputs: dict | None = None,
        factors: list | None = None,
        **extra,
    ) -> Path:
        if factors is None:
            factors = [f.model_dump() for f in reference_factors()]
        data = {
            "schema_version": 1,
            "scenario": {"factors": factors, "n_samples": n_samples, "seed": seed},
            "limits": [0.95],
            "outputs": outputs or {},
            **extra,
        }
        path = tmp_path / "test.scenario"
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
