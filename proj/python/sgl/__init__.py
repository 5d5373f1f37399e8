"""Sparse-group lasso: solver, adaptive pipeline, and diagnostics."""

from ._core import (
    SglError,
    adaptive_weights,
    check_rates,
    first_step,
    fit_estimator,
    kkt_verify,
    sandwich_covariance,
    solve,
)

__all__ = [
    "SglError",
    "adaptive_weights",
    "check_rates",
    "first_step",
    "fit_estimator",
    "kkt_verify",
    "sandwich_covariance",
    "solve",
]
