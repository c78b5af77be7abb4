"""Implicit mass-matrix penalization samplers (compiled core in ``_immp``)."""

from ._immp import (
    ConfigError,
    Error,
    Moments,
    asymptotic_moments,
    critical_dt_scaling_exponent,
    critical_timestep,
    delta_k,
    double_well_cdf,
    double_well_hmc,
    energy_variation_moments,
    experiment_names,
    gaussian_acceptance,
    h_mode,
    mode_propagator,
    neumann_spectral_inverse,
    neumann_spectral_transform,
    predicted_critical_dt,
    run_experiment,
    tridiagonal_solve,
    v_ext,
    v_int,
)

__all__ = [
    "ConfigError",
    "Error",
    "Moments",
    "asymptotic_moments",
    "critical_dt_scaling_exponent",
    "critical_timestep",
    "delta_k",
    "double_well_cdf",
    "double_well_hmc",
    "energy_variation_moments",
    "experiment_names",
    "gaussian_acceptance",
    "h_mode",
    "mode_propagator",
    "neumann_spectral_inverse",
    "neumann_spectral_transform",
    "predicted_critical_dt",
    "run_experiment",
    "tridiagonal_solve",
    "v_ext",
    "v_int",
]
