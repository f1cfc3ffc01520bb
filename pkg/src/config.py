"""Configuration module for the Sobolev certificate engine."""

import os
import yaml
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config.yaml"
DIGITS_ENV_VAR = "SOBOLEV_DIGITS"


def load_config_file(path: Optional[Path] = None) -> dict:
    """Load configuration from config.yaml (or an explicit path)."""
    config_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if config_path.exists():
        with open(config_path, "r") as f:
            return yaml.safe_load(f) or {}
    if path is not None:
        raise ConfigError(f"Config file not found: {config_path}")
    return {}


CONFIG_DATA = load_config_file()


@dataclass
class PrecisionConfig:
    """Output digits and mpmath working precisions."""

    digits: int
    jet_dps: int
    jet_dps_high: int
    constant_dps: int

    @classmethod
    def from_config(cls, data: Optional[dict] = None):
        """
        Create configuration from config.yaml.

        SOBOLEV_DIGITS, when set, overrides the output digits.
        """
        section = (CONFIG_DATA if data is None else data).get("precision", {})
        digits = section.get("digits", 12)

        env_digits = os.environ.get(DIGITS_ENV_VAR)
        if env_digits:
            try:
                digits = int(env_digits)
            except ValueError:
                raise ConfigError(f"{DIGITS_ENV_VAR} must be an integer, got {env_digits!r}")

        return cls(
            digits=digits,
            jet_dps=section.get("jet_dps", 20),
            jet_dps_high=section.get("jet_dps_high", 30),
            constant_dps=section.get("constant_dps", 60),
        )

    def jet_dps_for(self, dimension: int) -> int:
        """Working precision for jets in dimension N (extended from N = 4 on)."""
        return self.jet_dps_high if dimension >= 4 else self.jet_dps


@dataclass
class QuadratureConfig:
    """Adaptive quadrature tolerances."""

    tolerance: float
    tolerance_high_order: float
    limit: int

    @classmethod
    def from_config(cls, data: Optional[dict] = None):
        """Create configuration from config.yaml."""
        section = (CONFIG_DATA if data is None else data).get("quadrature", {})
        return cls(
            tolerance=float(section.get("tolerance", 1e-10)),
            tolerance_high_order=float(section.get("tolerance_high_order", 1e-8)),
            limit=int(section.get("limit", 400)),
        )

    def tolerance_for(self, dimension: int) -> float:
        """Default tolerance in dimension N (relaxed for N >= 4)."""
        return self.tolerance_high_order if dimension >= 4 else self.tolerance


@dataclass
class InvarianceConfig:
    """Seeded randomized suites."""

    seed: int
    rational_matrices: int
    float_matrices: int
    directions: int

    @classmethod
    def from_config(cls, data: Optional[dict] = None):
        """Create configuration from config.yaml."""
        section = (CONFIG_DATA if data is None else data).get("invariance", {})
        return cls(
            seed=int(section.get("seed", 20240601)),
            rational_matrices=int(section.get("rational_matrices", 10)),
            float_matrices=int(section.get("float_matrices", 100)),
            directions=int(section.get("directions", 20)),
        )


@dataclass
class TrackingConfig:
    """MLflow run tracking (off by default)."""

    enabled: bool
    experiment_name: str
    tracking_uri: str = ""

    @classmethod
    def from_config(cls, data: Optional[dict] = None):
        """Create configuration from config.yaml."""
        section = (CONFIG_DATA if data is None else data).get("tracking", {})
        return cls(
            enabled=bool(section.get("enabled", False)),
            experiment_name=section.get("experiment_name", "sobolev-certificates"),
            tracking_uri=section.get("tracking_uri", "") or "",
        )
