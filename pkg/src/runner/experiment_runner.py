"""
Experiment runner: loads settings, configures logging and dispatches subcommands.
"""

import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel

from src.analysis.condition import check_condition, condition_input_for, condition_sweep
from src.analysis.decay import exact_pairwise_moment, lognormal_moment_check, verify_discrete_decay
from src.analysis.laplace import laplace_estimate
from src.baseline.spg import spg_multistart
from src.bench.sweep import SweepResult, run_comparison, run_sweep
from src.dynamics.solver import run
from src.objectives.registry import build_objective, list_objectives
from src.tools.artifacts import ArtifactWriter
from src.utils.errors import ScboError
from src.utils.helpers import derive_seed, get_timestamp, load_yaml

from .schema import ArtifactEnvelope, Command, Subcommand, parse_section


LOG_LEVEL_ENV = "SCBO_LOG_LEVEL"
_VERBOSITY_LEVELS = {0: "WARNING", 1: "INFO"}


class ExperimentRunner:
    """
    Runs one experiment document per command and writes its artifacts.
    """

    def __init__(
        self,
        config_path: Optional[str] = None,
        config_dict: Optional[Dict[str, Any]] = None,
        verbosity: int = 0,
    ):
        """
        Initialize the runner.

        Args:
            config_path: Path to the settings YAML file
            config_dict: Settings dictionary (alternative to config_path)
            verbosity: Number of -v flags (0 warnings, 1 info, 2+ debug)
        """
        self.config = self._load_config(config_path, config_dict)
        self.verbosity = verbosity
        self._setup_logging()

        app = self.config.get("app", {})
        self.name = app.get("name", "SCBO")
        self.version = app.get("version", "1.0.0")
        self.max_workers = self._default_workers()

        logger.info(f"Initialized {self.name} v{self.version}")

    def _load_config(self, config_path: Optional[str], config_dict: Optional[Dict[str, Any]]) -> Dict[str, Any]:
        """Load settings from file or dictionary."""
        if config_dict or config_path:
            return load_yaml(config_path, config_dict)
        return {"app": {"name": "SCBO", "version": "1.0.0"}}

    def _setup_logging(self) -> None:
        """Console sink from -v, else SCBO_LOG_LEVEL, else WARNING; file sink from settings."""
        log_config = self.config.get("logging", {})
        if self.verbosity > 0:
            level = _VERBOSITY_LEVELS.get(self.verbosity, "DEBUG")
        else:
            level = os.getenv(LOG_LEVEL_ENV) or _VERBOSITY_LEVELS[0]
        self.log_level = level.upper()

        logger.remove()
        logger.add(sys.stderr, level=self.log_level)

        if log_config.get("file_path"):
            log_file = Path(log_config["file_path"])
            log_file.parent.mkdir(parents=True, exist_ok=True)
            logger.add(
                log_file,
                rotation=log_config.get("max_file_size", "10 MB"),
                retention=log_config.get("backup_count", 5),
                level=log_config.get("log_level", "INFO"),
                format=log_config.get("format", "{time} - {name} - {level} - {message}"),
            )

    def _default_workers(self) -> int:
        configured = self.config.get("workers", {}).get("max_workers")
        return int(configured) if configured else (os.cpu_count() or 1)

    def _output_dir(self, override: Optional[str]) -> Optional[str]:
        return override or os.getenv("SCBO_OUTPUT_DIR") or self.config.get("output", {}).get("directory")

    def execute(self, cmd: Command) -> Dict[str, Any]:
        """
        Execute one command.

        Args:
            cmd: Parsed command

        Returns:
            Dictionary with status, exit_code, summary lines and artifact paths
        """
        subcommand = Subcommand(cmd.subcommand)
        logger.info(f"Executing {subcommand.value} with {cmd.config_path}")
        try:
            document = load_yaml(cmd.config_path)
            section = parse_section(document, subcommand)
            if cmd.seed is not None:
                section = section.with_seed(cmd.seed)

            writer = ArtifactWriter(self._output_dir(cmd.output))
            workers = cmd.workers or self.max_workers
            handler = getattr(self, f"_do_{subcommand.section}")
            lines = handler(section, writer, workers)

            return {
                "status": "success",
                "exit_code": 0,
                "command": subcommand.value,
                "summary": lines,
                "artifacts": [str(p) for p in writer.written],
                "timestamp": datetime.now().isoformat(),
            }
        except FileNotFoundError as e:
            return self._error(subcommand, e, 2)
        except ScboError as e:
            return self._error(subcommand, e, e.exit_code)

    def _error(self, subcommand: Subcommand, error: Exception, code: int) -> Dict[str, Any]:
        logger.error(f"{subcommand.value} failed: {error}")
        return {
            "status": "error",
            "exit_code": code,
            "command": subcommand.value,
            "error_type": type(error).__name__,
            "error": str(error),
            "timestamp": datetime.now().isoformat(),
        }

    def _envelope(self, subcommand: Subcommand, section: BaseModel, result: Any) -> ArtifactEnvelope:
        if isinstance(result, BaseModel):
            result = result.model_dump(mode="json", by_alias=True)
        elif isinstance(result, list):
            result = [r.model_dump(mode="json", by_alias=True) if isinstance(r, BaseModel) else r for r in result]
        return ArtifactEnvelope(
            command=subcommand,
            app_version=self.version,
            created=get_timestamp(),
            config=section.model_dump(mode="json", by_alias=True),
            result=result,
        )

    def _do_run(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        objective = build_objective(section.objective, section.solver.dim, section.smoother.value, section.box)
        reports = []
        for i in range(section.runs):
            cfg = section.solver
            if i:
                cfg = cfg.model_copy(update={"seed": derive_seed(section.solver.seed, i)})
            reports.append(run(cfg, objective, section.init, section.method, section.success_threshold))

        result: Any = reports[0] if section.runs == 1 else reports
        writer.write_json("run_report.json", self._envelope(Subcommand.RUN, section, result))
        traces = pd.DataFrame(
            [
                {"run": i, "seed": r.config["seed"], "t": p.t, "diameter": p.diameter}
                for i, r in enumerate(reports)
                for p in r.trace
            ]
        )
        writer.write_csv("run_trace.csv", traces)
        return [
            f"run {i} seed={r.config['seed']}: f(x_inf)={r.f_inf:.4e} success={r.success} "
            f"steps={r.n_steps} diameter={r.final_diameter:.3e}"
            for i, r in enumerate(reports)
        ]

    def _write_sweep(self, name: str, subcommand: Subcommand, section, writer: ArtifactWriter, result: SweepResult, paired: bool) -> List[str]:
        writer.write_json(f"{name}.json", self._envelope(subcommand, section, result))
        writer.write_csv(f"{name}.csv", result.to_paired_frame() if paired else result.to_frame())
        writer.write_csv(f"{name}_curves.csv", result.to_curves())
        return [
            f"{c.objective} {c.vary.value}={c.value:g} [{c.method.value}]: rate={c.rate:.2f} "
            f"fun-val={c.fun_val:.3e} sol-err={c.sol_err:.3e}"
            for c in result.cells
        ]

    def _do_sweep(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        result = run_sweep(section, max_workers=workers)
        return self._write_sweep("sweep", Subcommand.SWEEP, section, writer, result, paired=False)

    def _do_compare(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        result = run_comparison(section, pair=section.pair, max_workers=workers)
        return self._write_sweep("compare", Subcommand.COMPARE, section, writer, result, paired=True)

    def _do_check_condition(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        objective = build_objective(section.objective, section.solver.dim, section.smoother.value, section.box)
        ci = condition_input_for(
            objective,
            section.solver,
            section.init,
            n_draws=section.n_draws,
            epsilon=section.epsilon,
            delta=section.delta,
            mu_bar=section.mu_bar,
        )
        report = check_condition(ci)
        result: Dict[str, Any] = {"condition": report.model_dump(mode="json")}
        lines = [
            f"beta={report.beta:g}: lhs={report.lhs:.4e} rhs={report.rhs:.4e} "
            f"satisfied={report.satisfied} E(beta)={report.error_bound:.4e}"
        ]
        if section.betas:
            sweep = condition_sweep(ci, section.betas)
            result["beta_sweep"] = [r.model_dump(mode="json") for r in sweep]
            lines += [f"beta={r.beta:g}: satisfied={r.satisfied}" for r in sweep]

        if section.runs:
            values = []
            for i in range(section.runs):
                cfg = section.solver.model_copy(update={"seed": derive_seed(section.solver.seed, "condition", i)})
                values.append(run(cfg, objective, section.init).f_inf)
            hits = int(np.sum(np.asarray(values) <= section.f_target))
            result["runs"] = {
                "f_inf": values,
                "f_target": section.f_target,
                "n_within_target": hits,
                # the smallest observed value only bounds the essential infimum from above
                "min_over_runs_f_inf": float(min(values)),
                "median_f_inf": float(np.median(values)),
            }
            lines.append(f"{hits}/{section.runs} runs with f(x_inf) <= {section.f_target:g}")

        writer.write_json("condition.json", self._envelope(Subcommand.CHECK_CONDITION, section, result))
        return lines

    def _do_decay_probe(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        result: Dict[str, Any] = {}
        lines = []
        if section.probe is not None:
            rows = exact_pairwise_moment(section.probe, section.init_diff)
            result["pairwise"] = [r.model_dump() for r in rows]
            writer.write_csv("decay_pairwise.csv", pd.DataFrame([r.model_dump() for r in rows]))
            lines += [f"t={r.t:g}: empirical={r.empirical:.4e} theoretical={r.theoretical:.4e}" for r in rows]
        if section.discrete is not None:
            d = section.discrete
            report = verify_discrete_decay(d.solver, d.n_steps, d.n_seeds, d.checkpoints)
            result["discrete"] = report.model_dump(mode="json", by_alias=True)
            writer.write_csv("decay_discrete.csv", pd.DataFrame([r.model_dump() for r in report.rows]))
            lines += [f"step {r.step}: ratio={r.ratio:.4f} (se {r.se:.2e})" for r in report.rows]
        if section.lognormal is not None:
            ln = section.lognormal
            check = lognormal_moment_check(ln.sigma, ln.t, ln.n_samples, ln.seed)
            result["lognormal"] = check.model_dump()
            lines.append(f"E[exp(2 sigma W)]={check.estimate:.4e} vs {check.theoretical:.4e}")
        writer.write_json("decay.json", self._envelope(Subcommand.DECAY_PROBE, section, result))
        return lines

    def _do_laplace(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        objective = build_objective(section.objective, section.dim, section.smoother.value, section.box)
        report = laplace_estimate(objective, section.betas, section.n_samples, section.seed)
        writer.write_json("laplace.json", self._envelope(Subcommand.LAPLACE, section, report))
        writer.write_csv("laplace.csv", pd.DataFrame([r.model_dump() for r in report.rows]))
        return [f"beta={r.beta:g}: {r.estimate:.4e} (se {r.se:.1e})" for r in report.rows]

    def _do_spg_multistart(self, section, writer: ArtifactWriter, workers: int) -> List[str]:
        objective = build_objective(section.objective, section.dim, section.smoother.value, section.box)
        report = spg_multistart(
            objective, section.n_starts, section.spg, section.seed, section.success_threshold, section.starts
        )
        writer.write_json("spg_multistart.json", self._envelope(Subcommand.SPG_MULTISTART, section, report))
        writer.write_csv(
            "spg_starts.csv",
            pd.DataFrame(
                [
                    {**{f"x0_{i}": v for i, v in enumerate(r.x0)}, "f_final": r.f_final, "success": r.success}
                    for r in report.runs
                ]
            ),
        )
        return [f"{report.objective}: {report.n_success}/{report.n_starts} successful starts"]

    def get_status(self) -> Dict[str, Any]:
        """Get current runner status."""
        return {
            "name": self.name,
            "version": self.version,
            "status": "active",
            "objectives": list_objectives(),
            "subcommands": [s.value for s in Subcommand],
            "max_workers": self.max_workers,
            "timestamp": datetime.now().isoformat(),
        }
