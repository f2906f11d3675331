"""
Particle ensemble state and the seeded Gaussian noise stream.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from loguru import logger

from .config import NoiseMode, SolverConfig


@dataclass(frozen=True)
class Ensemble:
    """N x d particle positions at step n, time t = n h, with mu_t."""
    positions: np.ndarray
    t: float
    mu_t: float
    step_index: int = 0

    @classmethod
    def initial(cls, positions: np.ndarray, cfg: SolverConfig) -> "Ensemble":
        return cls(positions=np.asarray(positions, dtype=float), t=0.0, mu_t=cfg.mu0, step_index=0)

    @property
    def n_particles(self) -> int:
        return self.positions.shape[-2]

    @property
    def dim(self) -> int:
        return self.positions.shape[-1]

    def advanced(self, positions: np.ndarray, cfg: SolverConfig) -> "Ensemble":
        """The ensemble one step later; time is n*h rather than a running sum."""
        n = self.step_index + 1
        t = n * cfg.h
        return replace(self, positions=positions, t=t, mu_t=cfg.mu_at(t), step_index=n)


class NoiseSource:
    """
    Standard Gaussian increments for the corrector step.

    In common mode one d-vector per step is shared by all particles; in
    independent mode each particle gets its own d-vector. With batch set,
    every draw carries a leading axis of that many independent ensembles.
    """

    def __init__(
        self,
        seed,
        dim: int,
        n_particles: int,
        mode: NoiseMode = NoiseMode.COMMON,
        batch: Optional[int] = None,
    ):
        self.dim = dim
        self.n_particles = n_particles
        self.mode = NoiseMode(mode)
        self.batch = batch
        self._rng = np.random.default_rng(seed)
        if self.mode is NoiseMode.INDEPENDENT:
            logger.warning("Independent per-particle noise is outside the common-noise consensus theory")

    @classmethod
    def for_config(cls, cfg: SolverConfig, seed=None) -> "NoiseSource":
        return cls(cfg.seed if seed is None else seed, cfg.dim, cfg.n_particles, cfg.noise_mode)

    def draw(self) -> np.ndarray:
        if self.batch is not None:
            rows = 1 if self.mode is NoiseMode.COMMON else self.n_particles
            return self._rng.standard_normal((self.batch, rows, self.dim))
        if self.mode is NoiseMode.COMMON:
            return self._rng.standard_normal(self.dim)
        return self._rng.standard_normal((self.n_particles, self.dim))
