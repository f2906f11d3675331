"""
Objective registry: builds ObjectiveSpec instances by string id.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from src.utils.errors import ConfigError, UnknownObjectiveError

from .functions import FUNCTIONS, Constant, ObjectiveFunction
from .smoothing import SmoothAbs, SmootherKind, SmoothingSpec


BENCHMARK_IDS = ("f1", "f2", "f3", "f4", "f5")
OBJECTIVE_IDS = ("example1",) + BENCHMARK_IDS + ("sphere",)

DEFAULT_BOX: Tuple[float, float] = (-5.0, 5.0)
DEFAULT_MU_BAR = 1.0

# f_max grid: points per axis for d <= 2, total point cap above that
_GRID_POINTS_2D = 401
_GRID_CAP = 2_000_000
_GRID_CHUNK = 1 << 16


@dataclass(frozen=True)
class ObjectiveSpec:
    """A benchmark objective with its smoothing family and reference values."""
    id: str
    f: Callable[[np.ndarray], Union[float, np.ndarray]]
    smoother: SmoothingSpec
    dim: int
    box: Tuple[float, float]
    x_star: np.ndarray = field(repr=False)
    f_min: float
    f_max: float

    @property
    def lower(self) -> np.ndarray:
        return np.full(self.dim, self.box[0])

    @property
    def upper(self) -> np.ndarray:
        return np.full(self.dim, self.box[1])

    def normalized_gap(self, value: float) -> float:
        """|f - f_min| / (f_max - f_min); zero for a flat objective."""
        span = self.f_max - self.f_min
        if span <= 0:
            return 0.0
        return abs(float(value) - self.f_min) / span

    def is_success(self, value: float, threshold: float = 0.005) -> bool:
        return self.normalized_gap(value) < threshold


def grid_points_per_axis(dim: int) -> int:
    if dim <= 2:
        return _GRID_POINTS_2D
    return int(max(11, min(_GRID_POINTS_2D, np.floor(_GRID_CAP ** (1.0 / dim)))))


def compute_f_max(
    f: Callable[[np.ndarray], np.ndarray],
    dim: int,
    box: Tuple[float, float],
    points_per_axis: Optional[int] = None,
) -> float:
    """
    Maximum of f over a regular grid on the box (vertices included).

    Args:
        f: Objective accepting an (n, d) array
        dim: Dimension d
        box: (lo, hi) bounds of the cube
        points_per_axis: Grid resolution; defaults to grid_points_per_axis(dim)

    Returns:
        Largest grid value
    """
    k = points_per_axis or grid_points_per_axis(dim)
    axis = np.linspace(box[0], box[1], k)
    total = k**dim
    best = -np.inf
    for start in range(0, total, _GRID_CHUNK):
        flat = np.arange(start, min(start + _GRID_CHUNK, total))
        idx = np.stack(np.unravel_index(flat, (k,) * dim), axis=-1)
        values = np.asarray(f(axis[idx]), dtype=float)
        best = max(best, float(np.max(values)))
    return best


def _make_spec(
    objective_id: str,
    fn: ObjectiveFunction,
    box: Tuple[float, float],
    mu_bar: float,
    f_min: float,
) -> ObjectiveSpec:
    kappa, eta, q = fn.constants(mu_bar)
    smoother = SmoothingSpec(
        value=fn.value,
        grad_x=fn.grad,
        dmu=fn.dmu,
        kappa=float(kappa),
        eta=float(eta),
        q=float(q),
        mu_bar=float(mu_bar),
        kind=fn.kernel.kind.value,
    )
    f_max = compute_f_max(fn.f, fn.dim, box)
    logger.debug(
        f"Built {objective_id} (d={fn.dim}, {fn.kernel.kind.value}): "
        f"kappa={kappa:.4g}, eta={eta:.4g}, q={q}, f_max={f_max:.6g}"
    )
    return ObjectiveSpec(
        id=objective_id,
        f=fn.f,
        smoother=smoother,
        dim=fn.dim,
        box=box,
        x_star=np.zeros(fn.dim),
        f_min=f_min,
        f_max=f_max,
    )


def _validate(dim: int, box: Tuple[float, float], mu_bar: float) -> None:
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ConfigError(f"dimension must be a positive integer, got {dim!r}")
    if not box[0] < 0.0 < box[1]:
        raise ConfigError(f"search box {box} must contain the minimizer 0 in its interior")
    if mu_bar <= 0:
        raise ConfigError("mu_bar must be positive")


def build_objective(
    objective_id: str,
    dim: int,
    smoother_kind: str = SmootherKind.LOGEXP.value,
    box: Optional[Sequence[float]] = None,
    mu_bar: float = DEFAULT_MU_BAR,
) -> ObjectiveSpec:
    """
    Build a registered objective by id.

    Args:
        objective_id: One of OBJECTIVE_IDS
        dim: Dimension d
        smoother_kind: "logexp" or "sqrt"
        box: Search cube (lo, hi); defaults to [-5, 5]
        mu_bar: Upper end of the smoothing parameter range

    Returns:
        ObjectiveSpec with cached f_max
    """
    if objective_id not in FUNCTIONS:
        raise UnknownObjectiveError(
            f"Unknown objective id {objective_id!r}; expected one of {', '.join(OBJECTIVE_IDS)}"
        )
    key = tuple(float(b) for b in (box if box is not None else DEFAULT_BOX))
    if len(key) != 2:
        raise ConfigError(f"box must be a (lo, hi) pair, got {box!r}")
    kind = getattr(smoother_kind, "value", smoother_kind)
    return _build_cached(objective_id, dim, kind, key, mu_bar)


@lru_cache(maxsize=64)
def _build_cached(
    objective_id: str, dim: int, smoother_kind: str, box: Tuple[float, float], mu_bar: float
) -> ObjectiveSpec:
    _validate(dim, box, mu_bar)
    kernel = SmoothAbs(smoother_kind)
    radius = max(abs(box[0]), abs(box[1]))
    fn = FUNCTIONS[objective_id](int(dim), kernel, radius)
    return _make_spec(objective_id, fn, box, mu_bar, f_min=0.0)


def build_example1(d: int, smoother_kind: str = SmootherKind.LOGEXP.value, **kwargs) -> ObjectiveSpec:
    """The nonconvex, nonsmooth test function (1/10) sum(|x_l| - cos(pi x_l) + 1)."""
    return build_objective("example1", d, smoother_kind, **kwargs)


def build_benchmark(benchmark_id: str, d: int, smoother_kind: str = SmootherKind.LOGEXP.value, **kwargs) -> ObjectiveSpec:
    """One of the five benchmark functions f1..f5."""
    if benchmark_id not in BENCHMARK_IDS:
        raise UnknownObjectiveError(
            f"Unknown benchmark id {benchmark_id!r}; expected one of {', '.join(BENCHMARK_IDS)}"
        )
    return build_objective(benchmark_id, d, smoother_kind, **kwargs)


def build_constant(dim: int, level: float = 0.0, box: Tuple[float, float] = DEFAULT_BOX) -> ObjectiveSpec:
    """A flat objective f == level (used by the consensus decay probes)."""
    box = (float(box[0]), float(box[1]))
    _validate(dim, box, DEFAULT_MU_BAR)
    fn = Constant(dim, SmoothAbs(SmootherKind.LOGEXP), max(abs(box[0]), abs(box[1])), level=level)
    kappa, eta, q = fn.constants(DEFAULT_MU_BAR)
    smoother = SmoothingSpec(
        value=fn.value, grad_x=fn.grad, dmu=fn.dmu, kappa=kappa, eta=eta, q=q, mu_bar=DEFAULT_MU_BAR
    )
    return ObjectiveSpec(
        id="constant",
        f=fn.f,
        smoother=smoother,
        dim=dim,
        box=box,
        x_star=np.zeros(dim),
        f_min=fn.level,
        f_max=fn.level,
    )


def list_objectives() -> List[str]:
    return list(OBJECTIVE_IDS)
