"""Deterministic local baseline (smoothing projected gradient)."""

from .spg import SpgConfig, SpgMultistartReport, SpgReport, spg_multistart, spg_run

__all__ = ["SpgConfig", "SpgMultistartReport", "SpgReport", "spg_multistart", "spg_run"]
