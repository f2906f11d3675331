"""Monte Carlo experiment harness."""

from .sweep import CellResult, SweepResult, SweepSpec, VaryParam, run_comparison, run_sweep

__all__ = ["CellResult", "SweepResult", "SweepSpec", "VaryParam", "run_comparison", "run_sweep"]
