"""
Consensus point and the two-step (predictor-corrector) particle update.
"""

import math
from typing import Callable

import numpy as np

from src.objectives.smoothing import SmoothingSpec
from src.utils.errors import NumericalError

from .config import SolverConfig
from .ensemble import Ensemble, NoiseSource


def weighted_consensus(positions: np.ndarray, values: np.ndarray, beta: float) -> np.ndarray:
    """
    Gibbs-weighted mean of positions with weights exp(-beta * values).

    The minimum value is subtracted inside the exponent, so the largest
    weight is exactly 1. Leading axes are independent ensembles:
    positions (..., N, d) and values (..., N) give (..., d).
    """
    values = np.asarray(values, dtype=float)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        where = tuple(int(i) for i in bad[0])
        system = f" in ensemble {where[:-1]}" if len(where) > 1 else ""
        raise NumericalError(f"non-finite objective value {values[where]!r} at particle {where[-1]}{system}")

    weights = np.exp(-beta * (values - values.min(axis=-1, keepdims=True)))
    total = weights.sum(axis=-1)
    if not np.all(total > 0.0):
        raise NumericalError(f"consensus weights sum to {np.min(total)!r}")
    return (weights[..., None, :] @ positions)[..., 0, :] / total[..., None]


def consensus_point(ens: Ensemble, beta: float, smoother: SmoothingSpec) -> np.ndarray:
    """x* = sum_i x^i w_i / sum_i w_i with w_i = exp(-beta f~(x^i, mu_t))."""
    values = smoother.value(ens.positions, ens.mu_t)
    return weighted_consensus(ens.positions, values, beta)


def dscbo_update(
    positions: np.ndarray,
    consensus: np.ndarray,
    decay: float,
    noise_scale: float,
    w: np.ndarray,
) -> np.ndarray:
    """
    Predictor x^ = x* + decay (x - x*), corrector x^ - noise_scale * w * (x^ - x*).

    Broadcasts over leading axes: positions (..., N, d), consensus
    (..., 1, d) or (d,), w (..., 1, d), (d,) or (..., N, d).
    """
    predicted = consensus + decay * (positions - consensus)
    return predicted - noise_scale * w * (predicted - consensus)


def _advance(ens: Ensemble, cfg: SolverConfig, noise: NoiseSource, consensus: np.ndarray) -> Ensemble:
    decay = math.exp(-cfg.lambda_ * cfg.h)
    scale = cfg.sigma * math.sqrt(cfg.h)
    w = noise.draw()
    positions = dscbo_update(ens.positions, consensus[..., None, :], decay, scale, w)
    if not np.all(np.isfinite(positions)):
        raise NumericalError(f"non-finite particle update at step {ens.step_index}")
    return ens.advanced(positions, cfg)


def dscbo_step(ens: Ensemble, cfg: SolverConfig, noise: NoiseSource, smoother: SmoothingSpec) -> Ensemble:
    """One D-SCBO step with weights from the smoothed objective at mu_t."""
    consensus = consensus_point(ens, cfg.beta, smoother)
    return _advance(ens, cfg, noise, consensus)


def cbo_step(
    ens: Ensemble,
    cfg: SolverConfig,
    noise: NoiseSource,
    objective_f: Callable[[np.ndarray], np.ndarray],
) -> Ensemble:
    """Same update with weights exp(-beta f(x^i)) from the raw objective."""
    consensus = weighted_consensus(ens.positions, objective_f(ens.positions), cfg.beta)
    return _advance(ens, cfg, noise, consensus)
