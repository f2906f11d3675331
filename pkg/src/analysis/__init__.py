"""Consensus laws, Laplace estimates and the parameter condition checker."""

from .condition import (
    ConditionInput,
    ConditionReport,
    check_condition,
    condition_input_for,
    condition_sweep,
    default_epsilon,
    gamma_bound,
    gamma_integral,
    sample_initial_ensembles,
)
from .decay import (
    DecayProbe,
    DecayReport,
    DecayRow,
    LognormalCheck,
    MomentRow,
    exact_pairwise_moment,
    lognormal_moment_check,
    verify_discrete_decay,
)
from .laplace import LaplaceReport, LaplaceRow, laplace_estimate

__all__ = [
    "ConditionInput",
    "ConditionReport",
    "DecayProbe",
    "DecayReport",
    "DecayRow",
    "LaplaceReport",
    "LaplaceRow",
    "LognormalCheck",
    "MomentRow",
    "check_condition",
    "condition_input_for",
    "condition_sweep",
    "default_epsilon",
    "exact_pairwise_moment",
    "gamma_bound",
    "gamma_integral",
    "laplace_estimate",
    "lognormal_moment_check",
    "sample_initial_ensembles",
    "verify_discrete_decay",
]
