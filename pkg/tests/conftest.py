"""Pytest configuration and fixtures."""
import numpy as np
import pytest

SEED = 20240601


@pytest.fixture(autouse=True)
def reset_env_vars(monkeypatch):
    """Reset environment variables for each test."""
    env_vars = [
        "SOBOLEV_DIGITS",
        "MLFLOW_TRACKING_URI",
    ]

    for var in env_vars:
        monkeypatch.delenv(var, raising=False)


@pytest.fixture
def rng():
    """Seeded generator for rotations, points and directions."""
    return np.random.default_rng(SEED)
