"""
Experiment document schema.

One YAML document per invocation, with `schema_version: 1` and a section
named after the subcommand (dashes become underscores). Every section is
a pydantic model with unknown keys rejected; the validated section, with
all defaults filled in, is echoed into each artifact.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.analysis.decay import DecayProbe
from src.baseline.spg import SpgConfig
from src.bench.sweep import SweepSpec
from src.dynamics.config import InitSpec, SolverConfig
from src.dynamics.solver import Method
from src.objectives.smoothing import SmootherKind
from src.utils.errors import ConfigError
from src.utils.helpers import SCHEMA_VERSION, validate_config


class Subcommand(str, Enum):
    RUN = "run"
    SWEEP = "sweep"
    COMPARE = "compare"
    CHECK_CONDITION = "check-condition"
    DECAY_PROBE = "decay-probe"
    LAPLACE = "laplace"
    SPG_MULTISTART = "spg-multistart"

    @property
    def section(self) -> str:
        return self.value.replace("-", "_")


@dataclass(frozen=True)
class Command:
    """A parsed CLI invocation."""
    subcommand: Subcommand
    config_path: str
    output: Optional[str] = None
    seed: Optional[int] = None
    verbosity: int = 0
    workers: Optional[int] = None


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    def with_seed(self, seed: int) -> "_Section":
        raise NotImplementedError


class RunSection(_Section):
    objective: str
    smoother: SmootherKind = SmootherKind.LOGEXP
    box: Optional[Tuple[float, float]] = None
    method: Method = Method.SCBO
    success_threshold: float = Field(default=0.005, gt=0)
    runs: int = Field(default=1, ge=1)
    solver: SolverConfig
    init: Optional[InitSpec] = None

    def with_seed(self, seed: int) -> "RunSection":
        return self.model_copy(update={"solver": self.solver.model_copy(update={"seed": seed})})


class SweepSection(SweepSpec):
    def with_seed(self, seed: int) -> "SweepSection":
        return self.model_copy(update={"base_seed": seed})


class CompareSection(SweepSpec):
    pair: Literal["scbo_vs_cbo"] = "scbo_vs_cbo"

    def with_seed(self, seed: int) -> "CompareSection":
        return self.model_copy(update={"base_seed": seed})


class ConditionSection(_Section):
    objective: str
    smoother: SmootherKind = SmootherKind.LOGEXP
    box: Optional[Tuple[float, float]] = None
    solver: SolverConfig
    init: InitSpec = Field(default_factory=InitSpec)
    n_draws: int = Field(default=150, ge=2)
    epsilon: Optional[float] = Field(default=None, gt=0)
    delta: float = Field(default=0.01, gt=0)
    mu_bar: Optional[float] = Field(default=None, gt=0)
    betas: List[float] = Field(default_factory=list)
    runs: int = Field(default=0, ge=0)
    f_target: float = Field(default=1e-3, gt=0)

    def with_seed(self, seed: int) -> "ConditionSection":
        return self.model_copy(update={"solver": self.solver.model_copy(update={"seed": seed})})


class DiscreteDecaySection(_Section):
    solver: SolverConfig
    n_steps: int = Field(default=100, ge=1)
    n_seeds: int = Field(default=2000, ge=500)
    checkpoints: Optional[List[int]] = None


class LognormalSection(_Section):
    sigma: float = Field(ge=0)
    t: float = Field(ge=0)
    n_samples: int = Field(default=100_000, ge=2)
    seed: int = Field(default=0, ge=0)


class DecaySection(_Section):
    probe: Optional[DecayProbe] = None
    init_diff: float = 1.0
    discrete: Optional[DiscreteDecaySection] = None
    lognormal: Optional[LognormalSection] = None

    def with_seed(self, seed: int) -> "DecaySection":
        update: Dict[str, Any] = {}
        if self.probe is not None:
            update["probe"] = self.probe.model_copy(update={"seed": seed})
        if self.discrete is not None:
            solver = self.discrete.solver.model_copy(update={"seed": seed})
            update["discrete"] = self.discrete.model_copy(update={"solver": solver})
        if self.lognormal is not None:
            update["lognormal"] = self.lognormal.model_copy(update={"seed": seed})
        return self.model_copy(update=update)


class LaplaceSection(_Section):
    objective: str
    dim: int = Field(default=1, ge=1)
    smoother: SmootherKind = SmootherKind.LOGEXP
    box: Optional[Tuple[float, float]] = None
    betas: List[float] = Field(min_length=1)
    n_samples: int = Field(default=100_000, ge=2)
    seed: int = Field(default=0, ge=0)

    def with_seed(self, seed: int) -> "LaplaceSection":
        return self.model_copy(update={"seed": seed})


class SpgSection(_Section):
    objective: str
    dim: int = Field(default=2, ge=1)
    smoother: SmootherKind = SmootherKind.LOGEXP
    box: Optional[Tuple[float, float]] = None
    n_starts: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0)
    success_threshold: float = Field(default=0.005, gt=0)
    spg: SpgConfig = Field(default_factory=SpgConfig)
    starts: Optional[List[List[float]]] = None

    def with_seed(self, seed: int) -> "SpgSection":
        return self.model_copy(update={"seed": seed})


SECTIONS = {
    Subcommand.RUN: RunSection,
    Subcommand.SWEEP: SweepSection,
    Subcommand.COMPARE: CompareSection,
    Subcommand.CHECK_CONDITION: ConditionSection,
    Subcommand.DECAY_PROBE: DecaySection,
    Subcommand.LAPLACE: LaplaceSection,
    Subcommand.SPG_MULTISTART: SpgSection,
}


class ArtifactEnvelope(BaseModel):
    """Top level of every JSON artifact."""
    schema_version: Literal[1] = SCHEMA_VERSION
    command: Subcommand
    app_version: str
    created: str
    config: Dict[str, Any]
    result: Any


def _format_validation(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_section(document: Dict[str, Any], subcommand: Subcommand):
    """
    Validate an experiment document and return the section for subcommand.

    Args:
        document: Parsed YAML document
        subcommand: Which section to read

    Returns:
        The validated section model
    """
    validate_config(document)
    subcommand = Subcommand(subcommand)
    known = {"schema_version"} | {s.section for s in Subcommand}
    extra = sorted(set(document) - known)
    if extra:
        raise ConfigError(f"Unknown top-level key(s): {', '.join(extra)}")
    if subcommand.section not in document:
        raise ConfigError(f"Experiment document has no '{subcommand.section}' section")

    model = SECTIONS[subcommand]
    try:
        return model.model_validate(document[subcommand.section])
    except ValidationError as e:
        raise ConfigError(f"Invalid '{subcommand.section}' section: {_format_validation(e)}") from e
