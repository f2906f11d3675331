"""Tests for the command-line interface and the experiment runner."""

import json
from pathlib import Path

import pandas as pd
import pytest
import yaml

from src.analysis import ConditionReport, LaplaceReport
from src.baseline import SpgMultistartReport
from src.bench import SweepResult
from src.cli import main
from src.dynamics import RunReport
from src.runner import ArtifactEnvelope, ExperimentRunner, Subcommand, parse_section
from src.utils.errors import ConfigError

EXPERIMENTS = Path(__file__).resolve().parent.parent / "config" / "experiments"

SOLVER = {
    "lambda": 1.0,
    "sigma": 1.0,
    "beta": 50.0,
    "n_particles": 20,
    "dim": 2,
    "t_max": 0.5,
    "mu0": 1.0,
    "alpha": 0.9,
    "seed": 5,
}


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    """Run inside an empty directory so no default settings or log file are picked up."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SCBO_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("SCBO_LOG_LEVEL", raising=False)
    return tmp_path


def _write(path: Path, document: dict) -> str:
    path.write_text(yaml.safe_dump(document), encoding="utf-8")
    return str(path)


def _load(path: Path) -> ArtifactEnvelope:
    return ArtifactEnvelope.model_validate_json(path.read_text(encoding="utf-8"))


def _without_timing(path: Path) -> dict:
    data = json.loads(path.read_text(encoding="utf-8"))
    data.pop("created")
    data["result"].pop("wall_time", None)
    return data


def test_run_writes_valid_report(workspace, capsys):
    """A run emits a JSON report that re-validates and a diameter trace CSV."""
    config = _write(workspace / "run.yaml", {"schema_version": 1, "run": {"objective": "f1", "solver": SOLVER}})
    assert main(["run", "-c", config, "-o", str(workspace / "out")]) == 0
    assert "f(x_inf)=" in capsys.readouterr().out

    envelope = _load(workspace / "out" / "run_report.json")
    assert envelope.command is Subcommand.RUN
    assert envelope.schema_version == 1
    assert envelope.config["solver"]["h"] == 0.01
    assert envelope.config["smoother"] == "logexp"
    report = RunReport.model_validate(envelope.result)
    assert report.objective == "f1"
    assert report.config["seed"] == 5

    trace = pd.read_csv(workspace / "out" / "run_trace.csv")
    assert list(trace.columns) == ["run", "seed", "t", "diameter"]
    assert trace["t"].iloc[0] == 0.0


def test_run_with_several_seeds(workspace):
    """runs > 1 derives one seed per extra run and lists every report."""
    config = _write(
        workspace / "run.yaml",
        {"schema_version": 1, "run": {"objective": "f2", "runs": 3, "solver": SOLVER}},
    )
    assert main(["run", "-c", config, "-o", str(workspace)]) == 0
    reports = [RunReport.model_validate(r) for r in _load(workspace / "run_report.json").result]
    assert len(reports) == 3
    assert len({r.config["seed"] for r in reports}) == 3
    assert reports[0].config["seed"] == 5


def test_seed_override_reproduces_artifact(workspace):
    """--seed gives the same artifact as a document carrying that seed."""
    seeded = _write(workspace / "a.yaml", {"schema_version": 1, "run": {"objective": "f1", "solver": SOLVER}})
    other = dict(SOLVER, seed=0)
    unseeded = _write(workspace / "b.yaml", {"schema_version": 1, "run": {"objective": "f1", "solver": other}})
    assert main(["run", "-c", seeded, "-o", str(workspace / "a")]) == 0
    assert main(["run", "-c", unseeded, "-o", str(workspace / "b"), "--seed", "5"]) == 0
    assert _without_timing(workspace / "a" / "run_report.json") == _without_timing(workspace / "b" / "run_report.json")


def test_sweep_and_curves(workspace):
    """A sweep writes the table JSON, the per-cell CSV and the curves CSV."""
    sweep = {
        "objective_ids": ["f1"],
        "vary": "beta",
        "values": [10, 50],
        "runs_per_cell": 2,
        "fixed": SOLVER,
    }
    config = _write(workspace / "sweep.yaml", {"schema_version": 1, "sweep": sweep})
    assert main(["sweep", "-c", config, "-o", str(workspace), "-w", "1"]) == 0

    result = SweepResult.model_validate(_load(workspace / "sweep.json").result)
    assert [c.value for c in result.cells] == [10.0, 50.0]
    table = pd.read_csv(workspace / "sweep.csv")
    assert {"rate", "fun-val", "sol-err", "t_max", "consensus_tol"} <= set(table.columns)
    curves = pd.read_csv(workspace / "sweep_curves.csv")
    assert list(curves.columns) == ["beta", "f1_scbo"]


def test_compare_writes_paired_table(workspace):
    """The comparison CSV has one column group per method."""
    compare = {"objective_ids": ["f2"], "vary": "N", "values": [10], "runs_per_cell": 2, "fixed": SOLVER}
    config = _write(workspace / "compare.yaml", {"schema_version": 1, "compare": compare})
    assert main(["compare", "-c", config, "-o", str(workspace), "-w", "1"]) == 0
    table = pd.read_csv(workspace / "compare.csv")
    assert {"rate_scbo", "rate_cbo", "fun-val_cbo", "sol-err_scbo"} <= set(table.columns)


def test_check_condition_report(workspace, capsys):
    """The condition artifact itemizes the inequality, the beta sweep and the run outcomes."""
    solver = dict(SOLVER, n_particles=20, dim=1, beta=0.5, mu0=0.01, alpha=0.1)
    section = {
        "objective": "example1",
        "solver": solver,
        "init": {"lo": -0.2, "hi": 0.2},
        "n_draws": 20,
        "betas": [0.1, 1.0],
        "runs": 2,
    }
    config = _write(workspace / "cond.yaml", {"schema_version": 1, "check_condition": section})
    assert main(["check-condition", "-c", config, "-o", str(workspace)]) == 0
    assert "E(beta)=" in capsys.readouterr().out

    result = _load(workspace / "condition.json").result
    report = ConditionReport.model_validate(result["condition"])
    assert report.n_ensembles == 20
    assert [r["beta"] for r in result["beta_sweep"]] == [0.1, 1.0]
    assert len(result["runs"]["f_inf"]) == 2
    assert result["runs"]["min_over_runs_f_inf"] == min(result["runs"]["f_inf"])


def test_decay_subcommand_artifacts(workspace):
    """Continuous, discrete and lognormal probes land in one JSON plus two CSVs."""
    section = {
        "probe": {"lambda": 1.0, "sigma": 1.0, "t_checkpoints": [0.0, 1.0], "n_samples": 1000},
        "discrete": {"n_steps": 10, "n_seeds": 500, "solver": dict(SOLVER, n_particles=2)},
        "lognormal": {"sigma": 0.5, "t": 1.0, "n_samples": 1000},
    }
    config = _write(workspace / "decay.yaml", {"schema_version": 1, "decay_probe": section})
    assert main(["decay-probe", "-c", config, "-o", str(workspace)]) == 0

    result = _load(workspace / "decay.json").result
    assert set(result) == {"pairwise", "discrete", "lognormal"}
    assert len(pd.read_csv(workspace / "decay_pairwise.csv")) == 2
    assert len(pd.read_csv(workspace / "decay_discrete.csv")) == 10


def test_seed_override_reaches_lognormal_only_document(workspace):
    """--seed replaces the lognormal seed when that is the only part of the document."""
    section = {"lognormal": {"sigma": 0.5, "t": 1.0, "n_samples": 1000}}
    config = _write(workspace / "decay.yaml", {"schema_version": 1, "decay_probe": section})

    estimates = {}
    for seed in (1, 2):
        out = workspace / f"seed{seed}"
        assert main(["decay-probe", "-c", config, "-o", str(out), "--seed", str(seed)]) == 0
        envelope = _load(out / "decay.json")
        assert envelope.config["lognormal"]["seed"] == seed
        estimates[seed] = envelope.result["lognormal"]["estimate"]
    assert estimates[1] != estimates[2]

    assert main(["decay-probe", "-c", config, "-o", str(workspace / "again"), "--seed", "1"]) == 0
    assert _load(workspace / "again" / "decay.json").result["lognormal"]["estimate"] == estimates[1]


def test_laplace_and_spg(workspace):
    """The Laplace and SPG subcommands write reports that re-validate."""
    laplace = {"objective": "example1", "betas": [1.0, 10.0], "n_samples": 2000}
    config = _write(workspace / "laplace.yaml", {"schema_version": 1, "laplace": laplace})
    assert main(["laplace", "-c", config, "-o", str(workspace)]) == 0
    report = LaplaceReport.model_validate(_load(workspace / "laplace.json").result)
    assert [r.beta for r in report.rows] == [1.0, 10.0]

    spg = {"objective": "f1", "n_starts": 3, "spg": {"max_iters": 200}}
    config = _write(workspace / "spg.yaml", {"schema_version": 1, "spg_multistart": spg})
    assert main(["spg-multistart", "-c", config, "-o", str(workspace)]) == 0
    multistart = SpgMultistartReport.model_validate(_load(workspace / "spg_multistart.json").result)
    assert multistart.n_starts == 3
    starts = pd.read_csv(workspace / "spg_starts.csv")
    assert list(starts.columns) == ["x0_0", "x0_1", "f_final", "success"]


def test_output_directory_from_environment(workspace, monkeypatch):
    """Without -o the artifacts go to $SCBO_OUTPUT_DIR."""
    target = workspace / "from-env"
    monkeypatch.setenv("SCBO_OUTPUT_DIR", str(target))
    config = _write(workspace / "laplace.yaml", {"schema_version": 1, "laplace": {"objective": "f3", "betas": [1.0], "n_samples": 100}})
    assert main(["laplace", "-c", config]) == 0
    assert (target / "laplace.json").exists()


def test_empty_values_is_schema_error(workspace, capsys):
    """An empty value list fails validation with exit code 2."""
    sweep = {"objective_ids": ["f1"], "vary": "N", "values": [], "fixed": SOLVER}
    config = _write(workspace / "sweep.yaml", {"schema_version": 1, "sweep": sweep})
    assert main(["sweep", "-c", config, "-o", str(workspace)]) == 2
    assert "ConfigError" in capsys.readouterr().err
    assert not (workspace / "sweep.json").exists()


def test_unknown_objective_exit_code(workspace, capsys):
    """Unregistered ids exit with their own code."""
    config = _write(workspace / "run.yaml", {"schema_version": 1, "run": {"objective": "f9", "solver": SOLVER}})
    assert main(["run", "-c", config, "-o", str(workspace)]) == 3
    assert "f9" in capsys.readouterr().err

    sweep = {"objective_ids": ["f9"], "vary": "N", "values": [10], "fixed": SOLVER}
    config = _write(workspace / "sweep.yaml", {"schema_version": 1, "sweep": sweep})
    assert main(["sweep", "-c", config, "-o", str(workspace)]) == 3


def test_document_errors(workspace):
    """Missing files, wrong versions, stray keys and missing sections all exit with 2."""
    assert main(["run", "-c", str(workspace / "missing.yaml")]) == 2
    run = {"objective": "f1", "solver": SOLVER}
    assert main(["run", "-c", _write(workspace / "v2.yaml", {"schema_version": 2, "run": run})]) == 2
    assert main(["run", "-c", _write(workspace / "x.yaml", {"schema_version": 1, "run": run, "extra": 1})]) == 2
    assert main(["laplace", "-c", _write(workspace / "s.yaml", {"schema_version": 1, "run": run})]) == 2
    bad_key = {"objective": "f1", "solver": dict(SOLVER, temperature=1.0)}
    assert main(["run", "-c", _write(workspace / "k.yaml", {"schema_version": 1, "run": bad_key})]) == 2


def test_unwritable_output(workspace):
    """An output path below a regular file cannot be created: exit code 4."""
    blocker = workspace / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    config = _write(workspace / "laplace.yaml", {"schema_version": 1, "laplace": {"objective": "f1", "betas": [1.0], "n_samples": 100}})
    assert main(["laplace", "-c", config, "-o", str(blocker / "sub")]) == 4


def test_missing_settings_file(workspace, capsys):
    """An explicit settings path that does not exist is reported."""
    config = _write(workspace / "laplace.yaml", {"schema_version": 1, "laplace": {"objective": "f1", "betas": [1.0]}})
    assert main(["--settings", str(workspace / "nope.yaml"), "laplace", "-c", config]) == 2
    assert "nope.yaml" in capsys.readouterr().err


def test_parse_section_directly():
    """parse_section fills defaults and rejects documents without a version."""
    section = parse_section({"schema_version": 1, "laplace": {"objective": "f1", "betas": [1.0]}}, Subcommand.LAPLACE)
    assert section.n_samples == 100_000
    assert section.dim == 1
    with pytest.raises(ConfigError):
        parse_section({"laplace": {"objective": "f1", "betas": [1.0]}}, "laplace")


@pytest.mark.parametrize("path", sorted(EXPERIMENTS.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_experiment_documents_validate(path):
    """Every document under config/experiments parses against its section schema."""
    document = yaml.safe_load(path.read_text(encoding="utf-8"))
    sections = [s for s in Subcommand if s.section in document]
    assert len(sections) == 1
    parse_section(document, sections[0])


def test_runner_status():
    """The runner reports its objectives and subcommands."""
    runner = ExperimentRunner(config_dict={"app": {"name": "SCBO", "version": "9.9"}, "workers": {"max_workers": 2}})
    status = runner.get_status()
    assert status["version"] == "9.9"
    assert status["max_workers"] == 2
    assert "f5" in status["objectives"]
    assert "check-condition" in status["subcommands"]


def test_verbose_flag_wins_over_environment_level(monkeypatch):
    """-v sets the console level even when SCBO_LOG_LEVEL is set; without -v the variable applies."""
    monkeypatch.setenv("SCBO_LOG_LEVEL", "error")
    settings = {"app": {"name": "SCBO", "version": "9.9"}}
    assert ExperimentRunner(config_dict=settings, verbosity=1).log_level == "INFO"
    assert ExperimentRunner(config_dict=settings, verbosity=3).log_level == "DEBUG"
    assert ExperimentRunner(config_dict=settings).log_level == "ERROR"
    monkeypatch.delenv("SCBO_LOG_LEVEL")
    assert ExperimentRunner(config_dict=settings).log_level == "WARNING"
