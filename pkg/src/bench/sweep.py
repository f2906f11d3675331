"""
Success-rate sweeps over N or beta, and paired SCBO/CBO comparisons.

Every run gets its seed from derive_seed(base_seed, objective, value, run),
so adding cells never changes the runs of existing cells, and both methods
of a comparison see identical initial ensembles and noise.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.dynamics.config import InitSpec, SolverConfig
from src.dynamics.solver import Method, RunDigest, run
from src.objectives.registry import OBJECTIVE_IDS, build_objective
from src.utils.errors import ConfigError, UnknownObjectiveError
from src.utils.helpers import derive_seed
from src.workflows.workflow_engine import Workflow, WorkflowEngine


class VaryParam(str, Enum):
    N = "N"
    BETA = "beta"


class SweepSpec(BaseModel):
    """A table: objectives x varied values x runs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    objective_ids: List[str] = Field(min_length=1)
    vary: VaryParam
    values: List[float] = Field(min_length=1)
    fixed: SolverConfig
    runs_per_cell: int = Field(default=100, ge=1)
    success_threshold: float = Field(default=0.005, gt=0)
    base_seed: int = Field(default=0, ge=0)
    smoother_kind: str = "logexp"
    init: Optional[InitSpec] = None
    box: Optional[Tuple[float, float]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.vary is VaryParam.N and any(v < 1 or v != int(v) for v in self.values):
            raise ValueError("particle numbers must be positive integers")
        if self.vary is VaryParam.BETA and any(v < 0 for v in self.values):
            raise ValueError("beta values must be nonnegative")
        return self

    def cell_config(self, value: float, seed: int) -> SolverConfig:
        update: Dict[str, Any] = {"seed": seed}
        if self.vary is VaryParam.N:
            update["n_particles"] = int(value)
        else:
            update["beta"] = float(value)
        return self.fixed.model_copy(update=update)

    def run_seed(self, objective_id: str, value: float, run_index: int) -> int:
        key = int(value) if self.vary is VaryParam.N else float(value)
        return derive_seed(self.base_seed, objective_id, key, run_index)


class CellResult(BaseModel):
    """Aggregate of one (objective, value, method) cell."""
    objective: str
    method: Method
    vary: VaryParam
    value: float
    n_particles: int
    beta: float
    runs: int
    n_success: int
    n_failed: int
    rate: float
    rate_se: float
    sol_err: float
    fun_val: float
    min_fun_val: float
    per_run: List[RunDigest]
    errors: List[str] = Field(default_factory=list)

    def within_band(self, expected_rate: float, n_sd: float = 3.0) -> bool:
        """|rate - expected| <= n_sd binomial SDs of the expected rate (at least one run's worth)."""
        sd = math.sqrt(expected_rate * (1.0 - expected_rate) / self.runs)
        return abs(self.rate - expected_rate) <= max(n_sd * sd, 1.0 / self.runs)


class SweepResult(BaseModel):
    spec: Dict[str, Any]
    methods: List[Method]
    t_max: float
    consensus_tol: float
    cells: List[CellResult]

    def cell(self, objective: str, value: float, method: Method = Method.SCBO) -> CellResult:
        for c in self.cells:
            if c.objective == objective and c.value == float(value) and c.method is Method(method):
                return c
        raise KeyError((objective, value, method))

    def to_frame(self) -> pd.DataFrame:
        """One row per cell; rate / fun-val / sol-err columns plus the horizon footer."""
        rows = [
            {
                "objective": c.objective,
                "method": c.method.value,
                "vary": c.vary.value,
                "value": c.value,
                "N": c.n_particles,
                "beta": c.beta,
                "runs": c.runs,
                "rate": c.rate,
                "rate_se": c.rate_se,
                "fun-val": c.fun_val,
                "sol-err": c.sol_err,
                "n_failed": c.n_failed,
                "t_max": self.t_max,
                "consensus_tol": self.consensus_tol,
            }
            for c in self.cells
        ]
        return pd.DataFrame(rows)

    def to_paired_frame(self) -> pd.DataFrame:
        """Comparison layout: one row per (objective, value) with a column group per method."""
        frame = self.to_frame()
        wide = frame.pivot_table(
            index=["objective", "value"],
            columns="method",
            values=["rate", "fun-val", "sol-err"],
            aggfunc="first",
            dropna=False,
        )
        wide.columns = [f"{metric}_{method}" for metric, method in wide.columns]
        return wide.reset_index()

    def to_curves(self) -> pd.DataFrame:
        """Plot-ready rate-vs-parameter curves: one column per objective and method."""
        frame = self.to_frame()
        frame["series"] = frame["objective"] + "_" + frame["method"]
        curves = frame.pivot_table(index="value", columns="series", values="rate", aggfunc="first", dropna=False)
        curves.index.name = self.cells[0].vary.value if self.cells else "value"
        return curves.reset_index()


def _run_task(
    cfg_data: Dict[str, Any],
    objective_id: str,
    smoother_kind: str,
    box: Optional[Tuple[float, float]],
    init_data: Optional[Dict[str, Any]],
    method: str,
    success_threshold: float,
) -> Dict[str, Any]:
    """Worker entry point: rebuild everything from plain data and return a digest."""
    cfg = SolverConfig.model_validate(cfg_data)
    objective = build_objective(objective_id, cfg.dim, smoother_kind, box)
    init = InitSpec.model_validate(init_data) if init_data is not None else None
    report = run(cfg, objective, init, Method(method), success_threshold)
    return report.digest().model_dump()


def _aggregate(
    spec: SweepSpec,
    objective_id: str,
    value: float,
    method: Method,
    outcomes: List[Dict[str, Any]],
) -> CellResult:
    digests = [RunDigest.model_validate(o["result"]) for o in outcomes if o["status"] == "completed"]
    errors = [f"{o['error_type']}: {o['error']}" for o in outcomes if o["status"] != "completed"]
    n_success = sum(d.success for d in digests)
    runs = spec.runs_per_cell
    rate = n_success / runs
    cfg = spec.cell_config(value, 0)
    if digests:
        sol_err = sum(d.sol_err for d in digests) / len(digests)
        fun_val = sum(d.f_inf for d in digests) / len(digests)
        min_fun_val = min(d.f_inf for d in digests)
    else:
        sol_err = fun_val = min_fun_val = float("nan")
    return CellResult(
        objective=objective_id,
        method=method,
        vary=spec.vary,
        value=float(value),
        n_particles=cfg.n_particles,
        beta=cfg.beta,
        runs=runs,
        n_success=n_success,
        n_failed=len(errors),
        rate=rate,
        rate_se=math.sqrt(rate * (1.0 - rate) / runs),
        sol_err=sol_err,
        fun_val=fun_val,
        min_fun_val=min_fun_val,
        per_run=digests,
        errors=errors,
    )


def _execute(spec: SweepSpec, methods: Sequence[Method], max_workers: int) -> SweepResult:
    unknown = [o for o in spec.objective_ids if o not in OBJECTIVE_IDS]
    if unknown:
        raise UnknownObjectiveError(
            f"Unknown objective id(s) {', '.join(unknown)}; expected one of {', '.join(OBJECTIVE_IDS)}"
        )
    workflow = Workflow(name=f"sweep-{spec.vary.value}-{spec.base_seed}")
    init_data = spec.init.model_dump(mode="json") if spec.init is not None else None
    layout = []
    for objective_id in spec.objective_ids:
        # build once in the parent so f_max is computed before workers start
        build_objective(objective_id, spec.fixed.dim, spec.smoother_kind, spec.box)
        for value in spec.values:
            for method in methods:
                names = []
                for r in range(spec.runs_per_cell):
                    seed = spec.run_seed(objective_id, value, r)
                    cfg_data = spec.cell_config(value, seed).to_dict()
                    name = f"{objective_id}|{value:g}|{method.value}|{r}"
                    workflow.add_task(
                        name,
                        _run_task,
                        cfg_data,
                        objective_id,
                        spec.smoother_kind,
                        spec.box,
                        init_data,
                        method.value,
                        spec.success_threshold,
                    )
                    names.append(name)
                layout.append((objective_id, value, method, names))

    results = WorkflowEngine(max_workers).run(workflow)

    cells = []
    for objective_id, value, method, names in layout:
        cell = _aggregate(spec, objective_id, value, method, [results[n] for n in names])
        cells.append(cell)
        logger.info(
            f"{objective_id} {spec.vary.value}={value:g} [{method.value}]: rate={cell.rate:.2f} "
            f"fun-val={cell.fun_val:.3e} sol-err={cell.sol_err:.3e} failed={cell.n_failed}"
        )

    return SweepResult(
        spec=spec.model_dump(mode="json", by_alias=True),
        methods=list(methods),
        t_max=spec.fixed.t_max,
        consensus_tol=spec.fixed.consensus_tol,
        cells=cells,
    )


def run_sweep(spec: SweepSpec, max_workers: int = 1) -> SweepResult:
    """
    Execute runs_per_cell seeded SCBO runs for every (objective, value) cell.

    Failed runs (divergence, numerical errors) are recorded per cell and
    count as unsuccessful.
    """
    return _execute(spec, [Method.SCBO], max_workers)


def run_comparison(spec: SweepSpec, pair: str = "scbo_vs_cbo", max_workers: int = 1) -> SweepResult:
    """SCBO and CBO on every cell with shared per-run seeds."""
    if pair != "scbo_vs_cbo":
        raise ConfigError(f"Unknown comparison pair {pair!r}; expected 'scbo_vs_cbo'")
    return _execute(spec, [Method.SCBO, Method.CBO], max_workers)
