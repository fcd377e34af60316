"""Occupational-measure LP bounds for long-run average and discounted control."""

from ._occulimits import (
    FiniteModel,
    ModelError,
    augmented_lp,
    bounds_report,
    certify_feedback,
    constant_cost_model,
    discounted_values,
    example1_family_model,
    example1_model,
    example2_model,
    finite_horizon_values,
    load_model,
    parse_model,
    random_model,
    run_cli,
    stationary_lp,
)

__all__ = [
    "FiniteModel",
    "ModelError",
    "augmented_lp",
    "bounds_report",
    "certify_feedback",
    "constant_cost_model",
    "discounted_values",
    "example1_family_model",
    "example1_model",
    "example2_model",
    "finite_horizon_values",
    "load_model",
    "parse_model",
    "random_model",
    "run_cli",
    "stationary_lp",
]
