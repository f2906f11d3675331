"""
Smoothing kernels for |s| and the smoothing-function container.

Both kernels are overflow safe: the log-exp form is evaluated as
2*mu*logaddexp(s/2mu, -s/2mu) == |s| + 2*mu*log1p(exp(-|s|/mu)), the
square-root form through hypot.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np
from scipy.special import expit

from src.utils.errors import ConfigError, NumericalError


ArrayLike = Union[float, np.ndarray]

LN4 = float(np.log(4.0))


class SmootherKind(str, Enum):
    """Available smoothing kernels for |s|."""
    LOGEXP = "logexp"
    SQRT = "sqrt"


def _check_inputs(s: ArrayLike, mu: float) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite input to smoothing kernel: {s!r}")
    if not np.isfinite(mu) or mu <= 0:
        raise NumericalError(f"smoothing parameter must be finite and positive, got {mu!r}")
    return arr


def _scalar_or_array(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


def smooth_abs_logexp(s: ArrayLike, mu: float) -> ArrayLike:
    """mu * ln(2 + exp(-s/mu) + exp(s/mu)), a smoothing function of |s|."""
    arr = _check_inputs(s, mu)
    return _scalar_or_array(_logexp_value(arr, mu))


def smooth_abs_sqrt(s: ArrayLike, mu: float) -> ArrayLike:
    """sqrt(s**2 + 4 mu**2), a smoothing function of |s|."""
    arr = _check_inputs(s, mu)
    return _scalar_or_array(_sqrt_value(arr, mu))


def _logexp_value(s: np.ndarray, mu: float) -> np.ndarray:
    half = s / (2.0 * mu)
    return 2.0 * mu * np.logaddexp(half, -half)


def _logexp_ds(s: np.ndarray, mu: float) -> np.ndarray:
    return np.tanh(s / (2.0 * mu))


def _logexp_dmu(s: np.ndarray, mu: float) -> np.ndarray:
    z = np.abs(s) / mu
    return 2.0 * np.log1p(np.exp(-z)) + 2.0 * z * expit(-z)


def _sqrt_value(s: np.ndarray, mu: float) -> np.ndarray:
    return np.hypot(s, 2.0 * mu)


def _sqrt_ds(s: np.ndarray, mu: float) -> np.ndarray:
    return s / np.hypot(s, 2.0 * mu)


def _sqrt_dmu(s: np.ndarray, mu: float) -> np.ndarray:
    return 4.0 * mu / np.hypot(s, 2.0 * mu)


class SmoothAbs:
    """
    A smoothing kernel phi(s, mu) of |s| with its derivatives and constants.

    Attributes:
        kind: Kernel identifier
        kappa: Bound on |d phi / d mu| (hence |phi - |s|| <= kappa * mu)
        floor: phi(s, mu) >= floor * mu for every s
        curvature: d2 phi / ds2 <= curvature / mu
    """

    def __init__(self, kind: Union[str, SmootherKind]):
        try:
            self.kind = SmootherKind(kind)
        except ValueError as e:
            raise ConfigError(f"Unknown smoother kind: {kind!r}") from e

        if self.kind is SmootherKind.LOGEXP:
            self.kappa = LN4
            self.floor = LN4
            self._value = _logexp_value
            self._ds = _logexp_ds
            self._dmu = _logexp_dmu
        else:
            self.kappa = 2.0
            self.floor = 2.0
            self._value = _sqrt_value
            self._ds = _sqrt_ds
            self._dmu = _sqrt_dmu
        self.curvature = 0.5

    def value(self, s: np.ndarray, mu: float) -> np.ndarray:
        return self._value(s, mu)

    def ds(self, s: np.ndarray, mu: float) -> np.ndarray:
        return self._ds(s, mu)

    def dmu(self, s: np.ndarray, mu: float) -> np.ndarray:
        return self._dmu(s, mu)

    def __repr__(self) -> str:
        return f"SmoothAbs({self.kind.value!r})"


@dataclass(frozen=True)
class SmoothingSpec:
    """
    A smoothing family f~(x, mu) of an objective with its certified constants.

    value, grad_x and dmu accept a point of shape (d,) or a stack of points
    of shape (n, d) and reduce over the last axis.
    """
    value: Callable[[np.ndarray, float], ArrayLike]
    grad_x: Callable[[np.ndarray, float], np.ndarray]
    dmu: Callable[[np.ndarray, float], ArrayLike]
    kappa: float
    eta: float
    q: float
    mu_bar: float
    kind: str = SmootherKind.LOGEXP.value

    def __post_init__(self):
        if self.kappa <= 0 or self.eta <= 0:
            raise ConfigError("kappa and eta must be positive")
        if not 0.0 <= self.q < 1.0:
            raise ConfigError(f"q must lie in [0, 1), got {self.q}")
        if self.mu_bar <= 0:
            raise ConfigError("mu_bar must be positive")

    def error_bound(self, mu: float) -> float:
        """kappa * mu**(1 - q), the bound on |f~(x, mu) - f(x)|."""
        return self.kappa * mu ** (1.0 - self.q)
