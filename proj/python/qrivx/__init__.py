"""Robust predictive quantile regression with IVX instruments."""

from qrivx._qrivx import (  # noqa: F401
    QrivxError,
    QuantileFit,
    OlsFit,
    InstrumentSet,
    TwoStepFit,
    ar1_coefficients,
    build_instrument,
    check_loss,
    chi2_cdf,
    chi2_quantile,
    construct_cp,
    construct_trend,
    estimate_density_at_zero,
    fit_ols,
    fit_quantile,
    make_instruments,
    norm_cdf,
    norm_quantile,
    qw_crps,
    run_simulation_config,
    run_tests,
    simulate_panel,
    split_demean,
    tail_indicator,
    two_step_estimate,
)

__all__ = [
    "QrivxError",
    "QuantileFit",
    "OlsFit",
    "InstrumentSet",
    "TwoStepFit",
    "ar1_coefficients",
    "build_instrument",
    "check_loss",
    "chi2_cdf",
    "chi2_quantile",
    "construct_cp",
    "construct_trend",
    "estimate_density_at_zero",
    "fit_ols",
    "fit_quantile",
    "make_instruments",
    "norm_cdf",
    "norm_quantile",
    "qw_crps",
    "run_simulation_config",
    "run_tests",
    "simulate_panel",
    "split_demean",
    "tail_indicator",
    "two_step_estimate",
]
