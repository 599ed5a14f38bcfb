"""IRSA with massive MIMO: SIC Monte Carlo, channel estimation and density evolution."""

from ._core import (
    Combiner,
    Estimator,
    SystemConfig,
    ThetaKind,
    compute_rate,
    de_fixed_point,
    degree_distribution,
    empirical_theta,
    inflection_load,
    lcmmse_estimate,
    list_presets,
    load_config,
    mmse_estimate,
    run_cli,
    simulate,
    theta_closed_form,
    theta_table,
)

try:
    from ._core import __version__
except ImportError:
    __version__ = "dev"

__all__ = [
    "Combiner",
    "Estimator",
    "SystemConfig",
    "ThetaKind",
    "compute_rate",
    "de_fixed_point",
    "degree_distribution",
    "empirical_theta",
    "inflection_load",
    "lcmmse_estimate",
    "list_presets",
    "load_config",
    "mmse_estimate",
    "run_cli",
    "simulate",
    "theta_closed_form",
    "theta_table",
]
