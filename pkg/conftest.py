"""Shared pytest fixtures."""

import numpy as np
import pytest

from subgroups.tables import get_tables
from utils.config import RunConfig


@pytest.fixture(scope="session")
def tables():
    """Coset and C tables, built once per test session."""
    return get_tables()


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def run_config(tmp_path):
    return RunConfig(output_dir=tmp_path / "output", cache_dir=tmp_path / "cache")
