import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conelab.exotic import ExoticGenerator
from conelab.models import Algebra

settings.register_profile(
    "conelab", max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("conelab")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def b3() -> ExoticGenerator:
    return ExoticGenerator(3, Algebra.R)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in ("CONELAB_THREADS", "CONELAB_EPS", "CONELAB_SAMPLES", "CONELAB_SEED", "CONELAB_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
