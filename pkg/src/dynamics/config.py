"""
Solver and initialization configuration.
"""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class NoiseMode(str, Enum):
    """How Gaussian increments are shared between particles."""
    COMMON = "common"
    INDEPENDENT = "independent"


class InitKind(str, Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class SolverConfig(BaseModel):
    """All scalars of a consensus run plus the schedule mu_t = mu0 * exp(-alpha t)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    lambda_: float = Field(alias="lambda", gt=0)
    sigma: float = Field(ge=0)
    beta: float = Field(ge=0)
    n_particles: int = Field(gt=0)
    dim: int = Field(gt=0)
    h: float = Field(default=0.01, gt=0)
    t_max: float = Field(default=20.0, gt=0)
    mu0: float = Field(gt=0)
    alpha: float = Field(gt=0)
    noise_mode: NoiseMode = NoiseMode.COMMON
    seed: int = Field(default=0, ge=0, lt=2**64)
    consensus_tol: float = Field(default=1e-8, gt=0)
    trace_every: int = Field(default=10, gt=0)

    @property
    def assumption1_holds(self) -> bool:
        """2 lambda > sigma^2."""
        return 2.0 * self.lambda_ > self.sigma**2

    @property
    def max_steps(self) -> int:
        return int(math.ceil(self.t_max / self.h - 1e-9))

    @property
    def step_contraction(self) -> float:
        """Per-step factor e^{-2 lambda h} (1 + sigma^2 h) of E[diff^2]."""
        return math.exp(-2.0 * self.lambda_ * self.h) * (1.0 + self.sigma**2 * self.h)

    def mu_at(self, t: float) -> float:
        return self.mu0 * math.exp(-self.alpha * t)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


class InitSpec(BaseModel):
    """Initial particle distribution (uniform on a cube or isotropic Gaussian)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InitKind = InitKind.UNIFORM
    lo: float = -5.0
    hi: float = 5.0
    mean: float = 0.0
    std: float = Field(default=1.0, gt=0)
    allow_outside: bool = False

    @model_validator(mode="after")
    def _check_bounds(self):
        if not self.lo < self.hi:
            raise ValueError(f"init box lower bound {self.lo} must be below upper bound {self.hi}")
        return self

    def sample(self, rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
        if self.kind is InitKind.UNIFORM:
            return rng.uniform(self.lo, self.hi, size=(n, dim))
        return rng.normal(self.mean, self.std, size=(n, dim))
