"""Tests for the success-rate sweeps and SCBO/CBO comparisons."""

import math
import os

import numpy as np
import pytest
from pydantic import ValidationError

from src.bench import CellResult, SweepSpec, VaryParam, run_comparison, run_sweep
from src.dynamics import InitSpec, Method, SolverConfig
from src.utils.errors import ConfigError, UnknownObjectiveError

WORKERS = max(1, min(os.cpu_count() or 1, 8))


def _fixed(**overrides) -> SolverConfig:
    base = dict(lambda_=1.0, sigma=1.0, beta=50.0, n_particles=20, dim=2, t_max=0.5, mu0=1.0, alpha=0.9)
    base.update(overrides)
    return SolverConfig(**base)


def _spec(**overrides) -> SweepSpec:
    base = dict(objective_ids=["f1"], vary="N", values=[10, 20], fixed=_fixed(), runs_per_cell=3, base_seed=1)
    base.update(overrides)
    return SweepSpec(**base)


def test_sweep_spec_validation():
    """Empty values, zero runs and non-integer particle counts are rejected."""
    with pytest.raises(ValidationError):
        _spec(values=[])
    with pytest.raises(ValidationError):
        _spec(runs_per_cell=0)
    with pytest.raises(ValidationError):
        _spec(values=[10.5])
    with pytest.raises(ValidationError):
        _spec(vary="beta", values=[-1.0])
    with pytest.raises(ValidationError):
        _spec(objective_ids=[])


def test_run_seeds_are_stable_across_tables():
    """A cell's seeds do not depend on which other cells the table holds."""
    small = _spec(values=[10])
    large = _spec(values=[10, 20, 40])
    for r in range(5):
        assert small.run_seed("f1", 10, r) == large.run_seed("f1", 10.0, r)
    assert small.run_seed("f1", 10, 0) != small.run_seed("f1", 10, 1)
    assert small.run_seed("f1", 10, 0) != small.run_seed("f2", 10, 0)


def test_cell_config_varies_one_parameter():
    """N cells set n_particles, beta cells set beta; the rest comes from fixed."""
    cfg = _spec().cell_config(40, seed=9)
    assert (cfg.n_particles, cfg.beta, cfg.seed) == (40, 50.0, 9)
    cfg = _spec(vary="beta", values=[120.0]).cell_config(120.0, seed=3)
    assert (cfg.n_particles, cfg.beta) == (20, 120.0)


def test_sweep_started_at_minimizer_always_succeeds():
    """Particles placed at x* with sigma = 0 give rate 1 and sol-err ~ 0."""
    spec = _spec(
        objective_ids=["f2"],
        vary="beta",
        values=[1000.0],
        fixed=_fixed(sigma=0.0),
        runs_per_cell=1,
        init=InitSpec(lo=-1e-9, hi=1e-9),
    )
    result = run_sweep(spec)
    cell = result.cell("f2", 1000.0)
    assert cell.rate == 1.0
    assert cell.n_success == 1
    assert cell.sol_err < 1e-16
    assert cell.n_failed == 0


def test_sweep_is_reproducible_and_shaped():
    """Same spec, same table; one cell per (objective, value)."""
    spec = _spec(objective_ids=["f1", "f3"])
    first = run_sweep(spec)
    second = run_sweep(spec)
    assert first.model_dump() == second.model_dump()
    assert len(first.cells) == 4
    assert first.methods == [Method.SCBO]
    assert first.t_max == 0.5
    assert first.consensus_tol == 1e-8
    for cell in first.cells:
        assert len(cell.per_run) == 3
        assert cell.rate == cell.n_success / cell.runs
        assert cell.sol_err >= 0.0
        assert cell.fun_val >= -1e-12


def test_sweep_parallel_matches_sequential():
    """Worker processes merge into the same table as an in-process run."""
    spec = _spec(values=[10])
    assert run_sweep(spec, max_workers=2).model_dump() == run_sweep(spec).model_dump()


def test_sweep_frames():
    """CSV layouts: one row per cell, plus plot-ready curves."""
    result = run_sweep(_spec())
    frame = result.to_frame()
    assert list(frame["value"]) == [10.0, 20.0]
    for column in ("objective", "method", "rate", "rate_se", "fun-val", "sol-err", "t_max", "consensus_tol"):
        assert column in frame.columns
    curves = result.to_curves()
    assert list(curves.columns) == ["N", "f1_scbo"]


def test_sweep_records_failed_runs():
    """Diverging runs are counted per cell and do not stop the table."""
    spec = _spec(values=[5], fixed=_fixed(sigma=1e6, beta=0.0), runs_per_cell=2)
    cell = run_sweep(spec).cell("f1", 5)
    assert cell.n_failed == 2
    assert cell.rate == 0.0
    assert cell.per_run == []
    assert all(e.startswith("DivergenceError") for e in cell.errors)
    assert math.isnan(cell.fun_val)


def test_sweep_unknown_objective():
    """An unregistered id is reported before any run starts."""
    with pytest.raises(UnknownObjectiveError):
        run_sweep(_spec(objective_ids=["f1", "f9"]))


def test_comparison_on_smooth_objective_is_identical():
    """When the smoothing family is f itself both methods produce the same runs."""
    spec = _spec(objective_ids=["sphere"], values=[15], runs_per_cell=2)
    result = run_comparison(spec)
    scbo = result.cell("sphere", 15, Method.SCBO)
    cbo = result.cell("sphere", 15, Method.CBO)
    assert [d.model_dump() for d in scbo.per_run] == [d.model_dump() for d in cbo.per_run]

    paired = result.to_paired_frame()
    assert {"rate_scbo", "rate_cbo", "fun-val_scbo", "sol-err_cbo"} <= set(paired.columns)
    assert len(paired) == 1


def test_paired_frame_keeps_columns_of_failed_cells():
    """A cell whose runs all diverge keeps its columns, with NaN fun-val and sol-err."""
    spec = _spec(values=[5], fixed=_fixed(sigma=1e6, beta=0.0), runs_per_cell=2)
    result = run_comparison(spec)
    paired = result.to_paired_frame()
    for method in ("scbo", "cbo"):
        assert paired[f"rate_{method}"].tolist() == [0.0]
        assert math.isnan(paired[f"fun-val_{method}"].iloc[0])
        assert math.isnan(paired[f"sol-err_{method}"].iloc[0])
    assert list(result.to_curves().columns) == ["N", "f1_cbo", "f1_scbo"]


def test_comparison_pair_name():
    """Only the SCBO/CBO pair exists."""
    with pytest.raises(ConfigError):
        run_comparison(_spec(), pair="scbo_vs_pso")


def test_within_band():
    """Three binomial standard deviations around the expected rate."""
    cell = CellResult(
        objective="f5", method=Method.SCBO, vary=VaryParam.BETA, value=120.0, n_particles=90, beta=120.0,
        runs=100, n_success=93, n_failed=0, rate=0.93, rate_se=0.0255, sol_err=0.0, fun_val=0.0,
        min_fun_val=0.0, per_run=[],
    )
    assert cell.within_band(0.97)
    assert not cell.within_band(0.999)
    assert not cell.within_band(1.0)


@pytest.mark.slow
def test_particle_count_table_at_n_200():
    """f1 and f2, beta = 50, N = 200, 100 runs: rates within 3 SD of 95%, most runs end at the minimizer."""
    spec = SweepSpec(
        objective_ids=["f1", "f2"], vary="N", values=[200],
        fixed=_fixed(n_particles=200, t_max=15.0), runs_per_cell=100, base_seed=3,
    )
    result = run_sweep(spec, max_workers=WORKERS)
    for objective_id in ("f1", "f2"):
        cell = result.cell(objective_id, 200)
        assert cell.within_band(0.95), (objective_id, cell.rate)
        assert np.median([d.sol_err for d in cell.per_run]) <= 1e-2
    # f1 runs trapped next to the minimizer dominate its mean error; f2 has none
    assert result.cell("f2", 200).rate >= 0.95
    assert result.cell("f2", 200).sol_err <= 1e-3


@pytest.mark.slow
def test_beta_rates_on_f1():
    """f1, N = 40, beta in {20, 140}: both rates in [0.5, 0.9] and no difference beyond 3 combined SEs."""
    spec = SweepSpec(
        objective_ids=["f1"], vary="beta", values=[20, 140],
        fixed=_fixed(n_particles=40, t_max=15.0), runs_per_cell=100, base_seed=4,
    )
    result = run_sweep(spec, max_workers=WORKERS)
    low, high = result.cell("f1", 20), result.cell("f1", 140)
    for cell in (low, high):
        assert 0.5 <= cell.rate <= 0.9, (cell.beta, cell.rate)
    assert abs(high.rate - low.rate) <= 3.0 * math.hypot(low.rate_se, high.rate_se)


@pytest.mark.slow
def test_comparison_parity():
    """f2 at N = 200, beta = 40: both methods >= 0.95; f5 at beta = 120, N = 90 near 97%."""
    fixed = _fixed(sigma=0.5, beta=40.0, n_particles=200, mu0=0.05, t_max=15.0)
    spec = SweepSpec(
        objective_ids=["f2"], vary="N", values=[200], fixed=fixed, runs_per_cell=100,
        base_seed=5, smoother_kind="sqrt",
    )
    result = run_comparison(spec, max_workers=WORKERS)
    assert result.cell("f2", 200, Method.SCBO).rate >= 0.95
    assert result.cell("f2", 200, Method.CBO).rate >= 0.95

    spec = SweepSpec(
        objective_ids=["f5"], vary="beta", values=[120], fixed=fixed.model_copy(update={"n_particles": 90}),
        runs_per_cell=100, base_seed=6, smoother_kind="sqrt",
    )
    result = run_comparison(spec, max_workers=WORKERS)
    assert result.cell("f5", 120, Method.SCBO).within_band(0.97)
