"""
Full consensus runs: initialization, stepping until consensus or horizon, reporting.
"""

import time
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel
from scipy.spatial.distance import pdist

from src.objectives.registry import ObjectiveSpec
from src.utils.errors import ConfigError, DivergenceError

from .config import InitKind, InitSpec, SolverConfig
from .ensemble import Ensemble, NoiseSource
from .stepper import cbo_step, consensus_point, dscbo_step, weighted_consensus


DIVERGENCE_LIMIT = 1e8
EXCURSION_MARGIN = 0.1


class Method(str, Enum):
    """Which weights drive the consensus point."""
    SCBO = "scbo"
    CBO = "cbo"


class TracePoint(BaseModel):
    t: float
    diameter: float


class RunDigest(BaseModel):
    """Compact per-run record kept by the bench."""
    seed: int
    x_inf: List[float]
    f_inf: float
    success: bool
    sol_err: float
    n_steps: int
    converged: bool
    excursion: bool


class RunReport(BaseModel):
    """Outcome of one run; wall_time is the only non-deterministic field."""
    objective: str
    method: Method
    smoother: str
    config: Dict[str, Any]
    init: Dict[str, Any]
    x_inf: List[float]
    f_inf: float
    f_min: float
    f_max: float
    normalized_gap: float
    success_threshold: float
    success: bool
    sol_err: float
    converged: bool
    n_steps: int
    t_final: float
    final_diameter: float
    trace: List[TracePoint]
    excursion: bool
    excursion_step: Optional[int] = None
    wall_time: float

    def digest(self) -> RunDigest:
        return RunDigest(
            seed=int(self.config["seed"]),
            x_inf=self.x_inf,
            f_inf=self.f_inf,
            success=self.success,
            sol_err=self.sol_err,
            n_steps=self.n_steps,
            converged=self.converged,
            excursion=self.excursion,
        )


def consensus_diameter(positions: np.ndarray) -> float:
    """max_{i,j} ||x^i - x^j||."""
    if positions.shape[0] < 2:
        return 0.0
    return float(np.max(pdist(positions)))


def _has_converged(positions: np.ndarray, tol: float) -> bool:
    # the bounding-box diagonal is at most sqrt(d) times the diameter
    extent = np.linalg.norm(np.ptp(positions, axis=0))
    if extent >= np.sqrt(positions.shape[1]) * tol:
        return False
    return consensus_diameter(positions) < tol


def _check_init(cfg: SolverConfig, objective: ObjectiveSpec, init: InitSpec, method: Method) -> None:
    if cfg.dim != objective.dim:
        raise ConfigError(f"solver dim {cfg.dim} does not match objective dim {objective.dim}")
    if method is Method.SCBO and cfg.mu0 > objective.smoother.mu_bar:
        raise ConfigError(f"mu0={cfg.mu0} exceeds the smoother's mu_bar={objective.smoother.mu_bar}")
    if init.kind is InitKind.UNIFORM and not init.allow_outside:
        if init.lo < objective.box[0] or init.hi > objective.box[1]:
            raise ConfigError(
                f"init box [{init.lo}, {init.hi}] is not inside the search box {list(objective.box)}"
            )


def run(
    cfg: SolverConfig,
    objective: ObjectiveSpec,
    init: Optional[InitSpec] = None,
    method: Method = Method.SCBO,
    success_threshold: float = 0.005,
) -> RunReport:
    """
    Run the particle system until consensus or the horizon.

    Args:
        cfg: Solver configuration (seed included)
        objective: Objective and its smoothing family
        init: Initial distribution; defaults to uniform on the search box
        method: SCBO (smoothed weights) or CBO (raw objective weights)
        success_threshold: Bound on the normalized gap for a successful run

    Returns:
        RunReport with the final consensus point and the diameter trace
    """
    method = Method(method)
    init = init or InitSpec(lo=objective.box[0], hi=objective.box[1])
    _check_init(cfg, objective, init, method)
    if not cfg.assumption1_holds:
        logger.warning(f"2*lambda <= sigma^2 ({cfg.lambda_}, {cfg.sigma}): no consensus guarantee")

    started = time.perf_counter()
    init_seq, noise_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    positions = init.sample(np.random.default_rng(init_seq), cfg.n_particles, cfg.dim)
    noise = NoiseSource.for_config(cfg, seed=noise_seq)
    ens = Ensemble.initial(positions, cfg)

    width = objective.box[1] - objective.box[0]
    outer_lo = objective.box[0] - EXCURSION_MARGIN * width
    outer_hi = objective.box[1] + EXCURSION_MARGIN * width
    excursion_step: Optional[int] = None

    trace = [TracePoint(t=0.0, diameter=consensus_diameter(ens.positions))]
    converged = False
    for _ in range(cfg.max_steps):
        if _has_converged(ens.positions, cfg.consensus_tol):
            converged = True
            break
        if method is Method.SCBO:
            ens = dscbo_step(ens, cfg, noise, objective.smoother)
        else:
            ens = cbo_step(ens, cfg, noise, objective.f)

        peak = float(np.max(np.abs(ens.positions)))
        if peak > DIVERGENCE_LIMIT:
            raise DivergenceError(f"particle coordinate {peak:.3g} exceeds {DIVERGENCE_LIMIT:g} at step {ens.step_index}")
        if excursion_step is None and (ens.positions.min() < outer_lo or ens.positions.max() > outer_hi):
            excursion_step = ens.step_index
            logger.warning(f"Particles left the bounded set around {objective.id} at step {ens.step_index}")
        if ens.step_index % cfg.trace_every == 0:
            trace.append(TracePoint(t=ens.t, diameter=consensus_diameter(ens.positions)))
    else:
        converged = _has_converged(ens.positions, cfg.consensus_tol)

    final_diameter = consensus_diameter(ens.positions)
    if trace[-1].t != ens.t:
        trace.append(TracePoint(t=ens.t, diameter=final_diameter))

    if method is Method.SCBO:
        x_inf = consensus_point(ens, cfg.beta, objective.smoother)
    else:
        x_inf = weighted_consensus(ens.positions, objective.f(ens.positions), cfg.beta)
    f_inf = float(objective.f(x_inf))
    gap = objective.normalized_gap(f_inf)

    report = RunReport(
        objective=objective.id,
        method=method,
        smoother=objective.smoother.kind,
        config=cfg.to_dict(),
        init=init.model_dump(mode="json"),
        x_inf=[float(v) for v in x_inf],
        f_inf=f_inf,
        f_min=objective.f_min,
        f_max=objective.f_max,
        normalized_gap=gap,
        success_threshold=success_threshold,
        success=gap < success_threshold,
        sol_err=float(np.sum((x_inf - objective.x_star) ** 2)),
        converged=converged,
        n_steps=ens.step_index,
        t_final=ens.t,
        final_diameter=final_diameter,
        trace=trace,
        excursion=excursion_step is not None,
        excursion_step=excursion_step,
        wall_time=time.perf_counter() - started,
    )
    logger.debug(
        f"{method.value} run on {objective.id} seed={cfg.seed}: f(x_inf)={f_inf:.3e}, "
        f"steps={ens.step_index}, converged={converged}"
    )
    return report
