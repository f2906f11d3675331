"""Objective functions, smoothing families and the benchmark registry."""

from .certify import CertReport, GradientReport, certify_constants, check_gradient
from .registry import (
    BENCHMARK_IDS,
    OBJECTIVE_IDS,
    ObjectiveSpec,
    build_benchmark,
    build_constant,
    build_example1,
    build_objective,
    list_objectives,
)
from .smoothing import SmoothAbs, SmootherKind, SmoothingSpec, smooth_abs_logexp, smooth_abs_sqrt

__all__ = [
    "BENCHMARK_IDS",
    "OBJECTIVE_IDS",
    "CertReport",
    "GradientReport",
    "ObjectiveSpec",
    "SmoothAbs",
    "SmootherKind",
    "SmoothingSpec",
    "build_benchmark",
    "build_constant",
    "build_example1",
    "build_objective",
    "certify_constants",
    "check_gradient",
    "list_objectives",
    "smooth_abs_logexp",
    "smooth_abs_sqrt",
]
