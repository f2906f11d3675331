"""
Grid certification of smoothing constants and finite-difference gradient checks.
"""

from typing import List, Optional, Sequence, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel

from src.utils.errors import ConfigError

from .registry import ObjectiveSpec


# relative slack for bounds that are attained exactly (e.g. sqrt kernel at s = 0)
_BOUND_SLACK = 1e-9


class CertReport(BaseModel):
    """Worst observed ratios against the declared kappa."""
    objective: str
    smoother: str
    kappa: float
    q: float
    mu_values: List[float]
    grid_resolution: int
    value_ratio_max: float
    dmu_ratio_max: float
    worst_value_point: List[float]
    worst_dmu_point: List[float]
    passed: bool


class GradientReport(BaseModel):
    objective: str
    mu: float
    n_points: int
    max_rel_error: float
    worst_point: List[float]


def _grid(spec: ObjectiveSpec, resolution: int) -> np.ndarray:
    axis = np.linspace(spec.box[0], spec.box[1], resolution)
    mesh = np.meshgrid(*([axis] * spec.dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _mu_values(spec: ObjectiveSpec, mu_samples: Union[int, Sequence[float]]) -> np.ndarray:
    mu_bar = spec.smoother.mu_bar
    if isinstance(mu_samples, (int, np.integer)):
        if mu_samples < 1:
            raise ConfigError("mu_samples must be at least 1")
        return np.geomspace(mu_bar * 1e-3, mu_bar, int(mu_samples))
    mus = np.asarray(list(mu_samples), dtype=float)
    if mus.size == 0 or np.any(mus <= 0) or np.any(mus > mu_bar):
        raise ConfigError(f"mu samples must lie in (0, {mu_bar}]")
    return mus


def certify_constants(
    spec: ObjectiveSpec,
    grid_resolution: int = 201,
    mu_samples: Union[int, Sequence[float]] = (1e-1, 1e-2, 1e-3),
) -> CertReport:
    """
    Check |f~ - f| <= kappa mu^(1-q) and |d f~/d mu| <= kappa mu^(-q) on a grid.

    Args:
        spec: Objective with its smoothing family
        grid_resolution: Points per axis over the search box
        mu_samples: Explicit mu values in (0, mu_bar], or a count of
            log-spaced values in [mu_bar/1000, mu_bar]

    Returns:
        CertReport with the worst observed ratios
    """
    sm = spec.smoother
    points = _grid(spec, grid_resolution)
    mus = _mu_values(spec, mu_samples)
    exact = np.asarray(spec.f(points), dtype=float)

    value_max, dmu_max = 0.0, 0.0
    value_at, dmu_at = points[0], points[0]
    for mu in mus:
        value_ratio = np.abs(np.asarray(sm.value(points, mu)) - exact) / mu ** (1.0 - sm.q)
        dmu_ratio = np.abs(np.asarray(sm.dmu(points, mu))) * mu**sm.q
        i, j = int(np.argmax(value_ratio)), int(np.argmax(dmu_ratio))
        if value_ratio[i] > value_max:
            value_max, value_at = float(value_ratio[i]), points[i]
        if dmu_ratio[j] > dmu_max:
            dmu_max, dmu_at = float(dmu_ratio[j]), points[j]

    limit = sm.kappa * (1.0 + _BOUND_SLACK)
    passed = value_max <= limit and dmu_max <= limit
    if not passed:
        logger.warning(
            f"Certification failed for {spec.id}: value ratio {value_max:.4g}, "
            f"dmu ratio {dmu_max:.4g}, declared kappa {sm.kappa:.4g}"
        )
    return CertReport(
        objective=spec.id,
        smoother=sm.kind,
        kappa=sm.kappa,
        q=sm.q,
        mu_values=[float(m) for m in mus],
        grid_resolution=grid_resolution,
        value_ratio_max=value_max,
        dmu_ratio_max=dmu_max,
        worst_value_point=[float(v) for v in value_at],
        worst_dmu_point=[float(v) for v in dmu_at],
        passed=passed,
    )


def check_gradient(
    spec: ObjectiveSpec,
    points: Optional[np.ndarray] = None,
    mu: float = 1e-2,
    n_points: int = 100,
    seed: int = 0,
) -> GradientReport:
    """
    Compare grad_x with central differences of the smoothed value.

    The step per coordinate is 1e-6 * max(1, |x_i|); the error is
    ||g_fd - g|| / max(1, ||g||).
    """
    if points is None:
        rng = np.random.default_rng(seed)
        points = rng.uniform(spec.lower, spec.upper, size=(n_points, spec.dim))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    sm = spec.smoother

    analytic = np.asarray(sm.grad_x(points, mu))
    numeric = np.empty_like(points)
    for i in range(spec.dim):
        step = 1e-6 * np.maximum(1.0, np.abs(points[:, i]))
        forward, backward = points.copy(), points.copy()
        forward[:, i] += step
        backward[:, i] -= step
        numeric[:, i] = (np.asarray(sm.value(forward, mu)) - np.asarray(sm.value(backward, mu))) / (
            forward[:, i] - backward[:, i]
        )

    errors = np.linalg.norm(numeric - analytic, axis=-1) / np.maximum(
        1.0, np.linalg.norm(analytic, axis=-1)
    )
    worst = int(np.argmax(errors))
    return GradientReport(
        objective=spec.id,
        mu=mu,
        n_points=len(points),
        max_rel_error=float(errors[worst]),
        worst_point=[float(v) for v in points[worst]],
    )
