"""
Closed-form objectives and their smoothing families.

Each smoothed family is obtained by replacing every |x_l| (including the
ones inside sqrt and composite expressions) with a smooth-abs kernel and
leaving the outer functions unchanged. All methods take points of shape
(d,) or (n, d) and reduce over the last axis.

Declared constants are analytic upper bounds valid on the search box
[-radius, radius]^d for mu in (0, mu_bar]:

    |d f~ / d mu| <= kappa * mu**(-q)        (so |f~ - f| <= kappa * mu**(1-q))
    ||Hess_x f~|| <= eta * mu**(-q-1)
"""

from typing import Dict, Tuple, Type

import numpy as np

from .smoothing import SmoothAbs


def _prod_except(a: np.ndarray) -> np.ndarray:
    """Product over the last axis leaving out one entry at a time."""
    ones = np.ones_like(a[..., :1])
    left = np.cumprod(np.concatenate([ones, a[..., :-1]], axis=-1), axis=-1)
    right = np.cumprod(np.concatenate([ones, a[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return left * right


class ObjectiveFunction:
    """Base class: a nonsmooth f with a smoothing family built from a kernel."""

    name = "objective"

    def __init__(self, dim: int, kernel: SmoothAbs, radius: float):
        self.dim = dim
        self.kernel = kernel
        self.radius = radius

    def f(self, x: np.ndarray):
        raise NotImplementedError

    def value(self, x: np.ndarray, mu: float):
        raise NotImplementedError

    def grad(self, x: np.ndarray, mu: float) -> np.ndarray:
        raise NotImplementedError

    def dmu(self, x: np.ndarray, mu: float):
        raise NotImplementedError

    def constants(self, mu_bar: float) -> Tuple[float, float, float]:
        """Return (kappa, eta, q)."""
        raise NotImplementedError


class Example1(ObjectiveFunction):
    """(1/10) * sum(|x_l| - cos(pi x_l) + 1)."""

    name = "example1"

    def f(self, x):
        x = np.asarray(x, dtype=float)
        return 0.1 * np.sum(np.abs(x) - np.cos(np.pi * x) + 1.0, axis=-1)

    def value(self, x, mu):
        x = np.asarray(x, dtype=float)
        return 0.1 * np.sum(self.kernel.value(x, mu) - np.cos(np.pi * x) + 1.0, axis=-1)

    def grad(self, x, mu):
        x = np.asarray(x, dtype=float)
        return 0.1 * (self.kernel.ds(x, mu) + np.pi * np.sin(np.pi * x))

    def dmu(self, x, mu):
        x = np.asarray(x, dtype=float)
        return 0.1 * np.sum(self.kernel.dmu(x, mu), axis=-1)

    def constants(self, mu_bar):
        c = self.kernel.kappa
        kappa = 0.1 * self.dim * c
        eta = 0.1 * (self.kernel.curvature + np.pi**2 * mu_bar)
        return kappa, eta, 0.0


class F1(ObjectiveFunction):
    """(1/d) * sum(|x_l| - 10 cos(2 pi x_l) + 10)."""

    name = "f1"

    def f(self, x):
        x = np.asarray(x, dtype=float)
        return np.mean(np.abs(x) - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)

    def value(self, x, mu):
        x = np.asarray(x, dtype=float)
        return np.mean(self.kernel.value(x, mu) - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)

    def grad(self, x, mu):
        x = np.asarray(x, dtype=float)
        return (self.kernel.ds(x, mu) + 20.0 * np.pi * np.sin(2.0 * np.pi * x)) / self.dim

    def dmu(self, x, mu):
        x = np.asarray(x, dtype=float)
        return np.mean(self.kernel.dmu(x, mu), axis=-1)

    def constants(self, mu_bar):
        eta = (self.kernel.curvature + 40.0 * np.pi**2 * mu_bar) / self.dim
        return self.kernel.kappa, eta, 0.0


class F2(ObjectiveFunction):
    """sum(|x_l|) + prod(|x_l|)."""

    name = "f2"

    def f(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        return np.sum(a, axis=-1) + np.prod(a, axis=-1)

    def value(self, x, mu):
        phi = self.kernel.value(np.asarray(x, dtype=float), mu)
        return np.sum(phi, axis=-1) + np.prod(phi, axis=-1)

    def grad(self, x, mu):
        x = np.asarray(x, dtype=float)
        phi = self.kernel.value(x, mu)
        return self.kernel.ds(x, mu) * (1.0 + _prod_except(phi))

    def dmu(self, x, mu):
        x = np.asarray(x, dtype=float)
        phi = self.kernel.value(x, mu)
        dphi = self.kernel.dmu(x, mu)
        return np.sum(dphi * (1.0 + _prod_except(phi)), axis=-1)

    def constants(self, mu_bar):
        c = self.kernel.kappa
        d = self.dim
        top = self.radius + c * mu_bar
        kappa = d * c * (1.0 + top ** (d - 1))
        eta = self.kernel.curvature * (1.0 + top ** (d - 1))
        if d > 1:
            eta += (d - 1) * top ** (d - 2) * mu_bar
        return kappa, eta, 0.0


class F3(ObjectiveFunction):
    """(1/4000) * sum(|x_l|) - prod(cos(x_l / sqrt(l))) + 1."""

    name = "f3"

    def _scales(self):
        return 1.0 / np.sqrt(np.arange(1, self.dim + 1, dtype=float))

    def f(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(np.abs(x), axis=-1) / 4000.0 - np.prod(np.cos(x * self._scales()), axis=-1) + 1.0

    def value(self, x, mu):
        x = np.asarray(x, dtype=float)
        phi = self.kernel.value(x, mu)
        return np.sum(phi, axis=-1) / 4000.0 - np.prod(np.cos(x * self._scales()), axis=-1) + 1.0

    def grad(self, x, mu):
        x = np.asarray(x, dtype=float)
        scales = self._scales()
        arg = x * scales
        return self.kernel.ds(x, mu) / 4000.0 + scales * np.sin(arg) * _prod_except(np.cos(arg))

    def dmu(self, x, mu):
        x = np.asarray(x, dtype=float)
        return np.sum(self.kernel.dmu(x, mu), axis=-1) / 4000.0

    def constants(self, mu_bar):
        kappa = self.dim * self.kernel.kappa / 4000.0
        eta = self.kernel.curvature / 4000.0 + self.dim * mu_bar
        return kappa, eta, 0.0


class F4(ObjectiveFunction):
    """
    Ackley-type function with |x_l| under the square root.

    sqrt(mean(phi)) behaves like |x|**(1/2) at the minimizer, so the family
    is declared with q = 1/2.
    """

    name = "f4"

    def f(self, x):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(np.mean(np.abs(x), axis=-1))
        return (
            -10.0 * np.exp(-0.2 * root)
            - np.exp(np.mean(np.cos(2.0 * np.pi * x), axis=-1))
            + 10.0
            + np.e
        )

    def value(self, x, mu):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(np.mean(self.kernel.value(x, mu), axis=-1))
        return (
            -10.0 * np.exp(-0.2 * root)
            - np.exp(np.mean(np.cos(2.0 * np.pi * x), axis=-1))
            + 10.0
            + np.e
        )

    def grad(self, x, mu):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(np.mean(self.kernel.value(x, mu), axis=-1))[..., None]
        cos_mean = np.mean(np.cos(2.0 * np.pi * x), axis=-1)[..., None]
        outer = np.exp(-0.2 * root) * self.kernel.ds(x, mu) / (self.dim * root)
        wave = (2.0 * np.pi / self.dim) * np.exp(cos_mean) * np.sin(2.0 * np.pi * x)
        return outer + wave

    def dmu(self, x, mu):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(np.mean(self.kernel.value(x, mu), axis=-1))
        return np.exp(-0.2 * root) * np.mean(self.kernel.dmu(x, mu), axis=-1) / root

    def constants(self, mu_bar):
        c = self.kernel.kappa
        floor = self.kernel.floor
        q = 0.5
        kappa = (c / np.sqrt(floor)) / (1.0 - q)
        eta = (
            self.kernel.curvature / np.sqrt(floor)
            + 0.5 / floor**1.5
            + 0.1 * np.sqrt(mu_bar) / floor
            + 8.0 * np.pi**2 * np.e * mu_bar**1.5
        ) / self.dim
        return float(kappa), float(eta), q


class F5(ObjectiveFunction):
    """[sum sin^2(x_l) - exp(-sum x_l^2)] * exp(-sum sin^2(sqrt|x_l|)) + 1."""

    name = "f5"

    @staticmethod
    def _amplitude(x):
        return np.sum(np.sin(x) ** 2, axis=-1) - np.exp(-np.sum(x**2, axis=-1))

    def f(self, x):
        x = np.asarray(x, dtype=float)
        damp = np.sum(np.sin(np.sqrt(np.abs(x))) ** 2, axis=-1)
        return self._amplitude(x) * np.exp(-damp) + 1.0

    def value(self, x, mu):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(self.kernel.value(x, mu))
        damp = np.sum(np.sin(root) ** 2, axis=-1)
        return self._amplitude(x) * np.exp(-damp) + 1.0

    def grad(self, x, mu):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(self.kernel.value(x, mu))
        damp = np.sum(np.sin(root) ** 2, axis=-1)[..., None]
        amp = self._amplitude(x)[..., None]
        gauss = np.exp(-np.sum(x**2, axis=-1))[..., None]
        d_amp = np.sin(2.0 * x) + 2.0 * x * gauss
        d_damp = np.sin(2.0 * root) * self.kernel.ds(x, mu) / (2.0 * root)
        return np.exp(-damp) * (d_amp - amp * d_damp)

    def dmu(self, x, mu):
        x = np.asarray(x, dtype=float)
        root = np.sqrt(self.kernel.value(x, mu))
        damp = np.sum(np.sin(root) ** 2, axis=-1)
        d_damp = np.sum(np.sin(2.0 * root) * self.kernel.dmu(x, mu) / (2.0 * root), axis=-1)
        return -self._amplitude(x) * np.exp(-damp) * d_damp

    def constants(self, mu_bar):
        d = self.dim
        amp_max = max(d, 1)
        kappa = amp_max * d * self.kernel.kappa
        eta = amp_max * (self.kernel.curvature + 0.44 * np.sqrt(mu_bar / self.kernel.floor)) + mu_bar * (
            2.0 + 2.0 + 4.0 / np.e + 3.72 * d + amp_max * d
        )
        return float(kappa), float(eta), 0.0


class Sphere(ObjectiveFunction):
    """sum(x_l^2); already smooth, the family does not depend on mu."""

    name = "sphere"

    def f(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(x**2, axis=-1)

    def value(self, x, mu):
        return self.f(x)

    def grad(self, x, mu):
        return 2.0 * np.asarray(x, dtype=float)

    def dmu(self, x, mu):
        return np.zeros(np.shape(x)[:-1])

    def constants(self, mu_bar):
        return 1e-12, 2.0 * mu_bar, 0.0


class Constant(ObjectiveFunction):
    """f == level everywhere."""

    name = "constant"

    def __init__(self, dim: int, kernel: SmoothAbs, radius: float, level: float = 0.0):
        super().__init__(dim, kernel, radius)
        self.level = float(level)

    def f(self, x):
        return np.full(np.shape(x)[:-1], self.level)

    def value(self, x, mu):
        return self.f(x)

    def grad(self, x, mu):
        return np.zeros(np.shape(x), dtype=float)

    def dmu(self, x, mu):
        return np.zeros(np.shape(x)[:-1])

    def constants(self, mu_bar):
        return 1e-12, 1e-12, 0.0


FUNCTIONS: Dict[str, Type[ObjectiveFunction]] = {
    cls.name: cls for cls in (Example1, F1, F2, F3, F4, F5, Sphere)
}
