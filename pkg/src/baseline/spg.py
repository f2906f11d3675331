"""
Smoothing projected gradient (SPG) descent on the smoothed objective.

Unconstrained, so the projection is the identity. Each iteration takes an
Armijo-backtracked gradient step on f~(., mu_k) and then shrinks mu by alpha2.
"""

from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.objectives.registry import ObjectiveSpec
from src.utils.errors import ConfigError


class SpgConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha2: float = Field(default=0.9, gt=0, lt=1)
    mu0: float = Field(default=0.1, gt=0)
    max_iters: int = Field(default=5000, gt=0)
    armijo_c: float = Field(default=1e-4, gt=0, lt=1)
    backtrack: float = Field(default=0.5, gt=0, lt=1)
    initial_step: float = Field(default=1.0, gt=0)
    grad_tol: float = Field(default=1e-8, gt=0)
    step_tol: float = Field(default=1e-14, ge=0)
    max_halvings: int = Field(default=60, gt=0)
    freeze_mu: bool = False


class SpgReport(BaseModel):
    objective: str
    x0: List[float]
    x_final: List[float]
    f_final: float
    normalized_gap: float
    success: bool
    grad_norm: float
    mu_final: float
    iterations: int
    converged: bool
    line_search_failed: bool


class SpgMultistartReport(BaseModel):
    """Initial points split by outcome; success uses the run-report criterion."""
    objective: str
    n_starts: int
    n_success: int
    success_threshold: float
    seed: int
    successful_starts: List[List[float]]
    unsuccessful_starts: List[List[float]]
    runs: List[SpgReport]


def spg_run(
    objective: ObjectiveSpec,
    x0: np.ndarray,
    cfg: Optional[SpgConfig] = None,
    success_threshold: float = 0.005,
) -> SpgReport:
    """
    Run SPG from x0.

    Stops when ||grad f~|| < grad_tol, when an accepted step moves less than
    step_tol, after max_iters, or when the line search fails max_halvings times.
    """
    cfg = cfg or SpgConfig()
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (objective.dim,) or not np.all(np.isfinite(x)):
        raise ConfigError(f"x0 must be a finite point of dimension {objective.dim}")

    sm = objective.smoother
    mu = cfg.mu0
    converged = failed = False
    grad_norm = float("inf")
    iterations = 0
    for k in range(cfg.max_iters):
        g = np.asarray(sm.grad_x(x, mu), dtype=float)
        grad_norm = float(np.linalg.norm(g))
        if grad_norm < cfg.grad_tol:
            converged = True
            break

        fx = float(sm.value(x, mu))
        step = cfg.initial_step
        for _ in range(cfg.max_halvings):
            trial = x - step * g
            if float(sm.value(trial, mu)) <= fx - cfg.armijo_c * step * grad_norm**2:
                break
            step *= cfg.backtrack
        else:
            failed = True
            logger.warning(f"SPG line search failed on {objective.id} at iteration {k}, mu={mu:.3g}")
            break

        moved = step * grad_norm
        x = trial
        iterations += 1
        if not cfg.freeze_mu:
            mu *= cfg.alpha2
        if moved < cfg.step_tol:
            converged = True
            break

    f_final = float(objective.f(x))
    gap = objective.normalized_gap(f_final)
    return SpgReport(
        objective=objective.id,
        x0=[float(v) for v in np.asarray(x0, dtype=float)],
        x_final=[float(v) for v in x],
        f_final=f_final,
        normalized_gap=gap,
        success=gap < success_threshold,
        grad_norm=grad_norm,
        mu_final=mu,
        iterations=iterations,
        converged=converged,
        line_search_failed=failed,
    )


def spg_multistart(
    objective: ObjectiveSpec,
    n_starts: int = 100,
    cfg: Optional[SpgConfig] = None,
    seed: int = 0,
    success_threshold: float = 0.005,
    starts: Optional[np.ndarray] = None,
) -> SpgMultistartReport:
    """SPG from explicit starts, or from n_starts points drawn uniformly on the search box."""
    if starts is None:
        if n_starts < 1:
            raise ConfigError("n_starts must be positive")
        rng = np.random.default_rng(seed)
        starts = rng.uniform(objective.lower, objective.upper, size=(n_starts, objective.dim))
    starts = np.atleast_2d(np.asarray(starts, dtype=float))

    runs = [spg_run(objective, x0, cfg, success_threshold) for x0 in starts]
    good = [r.x0 for r in runs if r.success]
    bad = [r.x0 for r in runs if not r.success]
    logger.info(f"SPG multi-start on {objective.id}: {len(good)}/{len(runs)} successful starts")
    return SpgMultistartReport(
        objective=objective.id,
        n_starts=len(runs),
        n_success=len(good),
        success_threshold=success_threshold,
        seed=seed,
        successful_starts=good,
        unsuccessful_starts=bad,
        runs=runs,
    )
