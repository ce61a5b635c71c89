from collections.abc import Callable, Generator
import os
from pathlib import Path

import numpy as np
import pytest

from gwpattern.core.console import reset_console
import gwpattern.core.settings as settings_module
from gwpattern.core.settings import Settings, reset_settings
from gwpattern.model.offspring import OffspringDistribution, make_offspring
from gwpattern.model.ordered_tree import OrderedTree
from gwpattern.model.sampler import sample_conditioned


@pytest.fixture(autouse=True)
def isolated_settings(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> Generator[None, None, None]:
    """Default settings, no user config file, no GWPATTERN_* overrides."""
    for key in list(os.environ):
        if key.startswith("GWPATTERN_"):
            monkeypatch.delenv(key)
    monkeypatch.setenv("GWPATTERN_CONFIG", str(tmp_path / "missing.toml"))
    original: Settings | None = settings_module._settings
    reset_settings()
    yield
    settings_module._settings = original


@pytest.fixture
def isolated_console() -> Generator[None, None, None]:
    """Reset global consoles before and after a test."""
    reset_console()
    yield
    reset_console()


@pytest.fixture
def geometric() -> OffspringDistribution:
    return make_offspring("geometric:0.5")


@pytest.fixture
def poisson() -> OffspringDistribution:
    return make_offspring("poisson:1")


@pytest.fixture
def poisson12() -> OffspringDistribution:
    return make_offspring("poisson:1:12")


@pytest.fixture
def binary() -> OffspringDistribution:
    return make_offspring("binomial:2:0.5")


@pytest.fixture
def full_binary() -> OffspringDistribution:
    return make_offspring("pmf:0.5,0,0.5")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_trees() -> Callable[[OffspringDistribution, int, int, int], list[OrderedTree]]:
    """Factory for conditioned samples used as hosts in counting tests."""

    def build(dist: OffspringDistribution, n: int, count: int, seed: int) -> list[OrderedTree]:
        gen = np.random.default_rng(seed)
        return [sample_conditioned(dist, n, gen) for _ in range(count)]

    return build
