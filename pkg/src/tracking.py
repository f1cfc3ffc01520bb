"""MLflow run tracking for certificate runs."""

import logging
import os
from typing import Mapping, Optional

import mlflow

from .config import TrackingConfig

logger = logging.getLogger(__name__)


def setup_tracking(config: TrackingConfig) -> bool:
    """
    Point MLflow at the configured store and experiment.

    MLFLOW_TRACKING_URI, when set, wins over the configured URI; with neither,
    MLflow keeps its local ./mlruns default.

    Returns:
        True if tracking is enabled and the experiment could be selected
    """
    if not config.enabled:
        return False
    try:
        if "MLFLOW_TRACKING_URI" in os.environ:
            mlflow.set_tracking_uri(os.environ["MLFLOW_TRACKING_URI"])
        elif config.tracking_uri:
            mlflow.set_tracking_uri(config.tracking_uri)
        mlflow.set_experiment(experiment_name=config.experiment_name)
        return True
    except Exception as e:
        logger.warning("❌ Could not set up MLflow tracking: %s", e)
        return False


def log_certificate(
    command: str,
    params: Mapping[str, object],
    metrics: Mapping[str, float],
    passed: bool,
    config: Optional[TrackingConfig] = None,
) -> bool:
    """
    Record one certificate run as an MLflow run.

    Args:
        command: CLI subcommand that produced the certificate
        params: Inputs of the run (N, m, eps, tol, seed, ...)
        metrics: Numeric outcomes (ratios, margins, errors)
        passed: Whether the certificate held
        config: Tracking configuration (config.yaml when omitted)

    Returns:
        True if the run was logged; tracking failures never propagate
    """
    config = config or TrackingConfig.from_config()
    if not setup_tracking(config):
        logger.debug("⚠️ MLflow tracking disabled, certificate not recorded")
        return False
    try:
        with mlflow.start_run(run_name=command):
            mlflow.set_tag("command", command)
            mlflow.set_tag("passed", str(passed).lower())
            mlflow.log_params({k: str(v) for k, v in params.items()})
            mlflow.log_metrics({k: float(v) for k, v in metrics.items()})
        logger.info("✅ Certificate %s logged to MLflow", command)
        return True
    except Exception as e:
        logger.warning("❌ Error logging certificate %s: %s", command, e)
        return False
