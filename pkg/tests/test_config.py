"""Tests for configuration module."""

import pytest

from src.config import (
    InvarianceConfig,
    PrecisionConfig,
    QuadratureConfig,
    TrackingConfig,
    load_config_file,
)
from src.errors import ConfigError


def test_precision_config_from_config():
    """Test PrecisionConfig creation from config file."""
    config = PrecisionConfig.from_config()

    assert config.digits == 12
    assert config.constant_dps == 60
    assert config.jet_dps_for(3) == 20
    assert config.jet_dps_for(4) == 30


def test_precision_digits_env_override(monkeypatch):
    """Test SOBOLEV_DIGITS overrides the configured digits."""
    monkeypatch.setenv("SOBOLEV_DIGITS", "20")

    assert PrecisionConfig.from_config().digits == 20


def test_precision_digits_env_must_be_integer(monkeypatch):
    """Test a malformed SOBOLEV_DIGITS raises ConfigError."""
    monkeypatch.setenv("SOBOLEV_DIGITS", "many")

    with pytest.raises(ConfigError):
        PrecisionConfig.from_config()


def test_quadrature_config_from_config():
    """Test QuadratureConfig creation from config file."""
    config = QuadratureConfig.from_config()

    assert config.limit == 400
    assert config.tolerance_for(3) == 1e-10
    assert config.tolerance_for(4) == 1e-8


def test_invariance_config_from_config():
    """Test InvarianceConfig creation from config file."""
    config = InvarianceConfig.from_config()

    assert config.seed == 20240601
    assert config.float_matrices == 100


def test_tracking_disabled_by_default():
    """Test MLflow tracking is off unless enabled."""
    config = TrackingConfig.from_config()

    assert config.enabled is False
    assert config.experiment_name == "sobolev-certificates"


def test_empty_sections_fall_back_to_defaults():
    """Test every config class tolerates a missing section."""
    assert PrecisionConfig.from_config({}).jet_dps == 20
    assert QuadratureConfig.from_config({}).tolerance == 1e-10
    assert InvarianceConfig.from_config({}).directions == 20
    assert TrackingConfig.from_config({}).tracking_uri == ""


def test_load_config_file(tmp_path):
    """Test loading an explicit YAML file."""
    path = tmp_path / "custom.yaml"
    path.write_text("quadrature:\n  tolerance: 1.0e-12\n  limit: 50\n")

    config = QuadratureConfig.from_config(load_config_file(path))

    assert config.tolerance == 1e-12
    assert config.limit == 50


def test_load_config_file_missing(tmp_path):
    """Test an explicit path that does not exist raises ConfigError."""
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "absent.yaml")
