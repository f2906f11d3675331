"""Particle dynamics: configuration, ensemble state, steppers and full runs."""

from .config import InitKind, InitSpec, NoiseMode, SolverConfig
from .ensemble import Ensemble, NoiseSource
from .solver import Method, RunDigest, RunReport, TracePoint, consensus_diameter, run
from .stepper import cbo_step, consensus_point, dscbo_step, dscbo_update, weighted_consensus

__all__ = [
    "Ensemble",
    "InitKind",
    "InitSpec",
    "Method",
    "NoiseMode",
    "NoiseSource",
    "RunDigest",
    "RunReport",
    "SolverConfig",
    "TracePoint",
    "cbo_step",
    "consensus_diameter",
    "consensus_point",
    "dscbo_step",
    "dscbo_update",
    "run",
    "weighted_consensus",
]
