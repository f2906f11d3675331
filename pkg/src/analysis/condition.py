"""
Parameter condition checker for convergence to the global minimum.

Evaluates both sides of

    (e^{-a} - eps) E[e^{beta (f~min - f(x_in))}]
        >= a / (1 - q) + gamma (2 lambda + sigma^2) eta beta sum_l E[max_i (x^i_l - xbar_l)^2]

with a = mu0^{1-q} beta kappa and f~min = f_min - kappa mu_bar^{1-q}, plus the
error bound E(beta) = -(1/beta) log E[e^{-beta f(x_in)}] - f_min - (1/beta) log eps.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel
from scipy.integrate import quad
from scipy.special import logsumexp

from src.dynamics.config import InitSpec, SolverConfig
from src.objectives.registry import ObjectiveSpec
from src.utils.errors import ConfigError, NumericalError


# relative agreement required between quadrature and the closed form
_QUAD_RTOL = 1e-8


def _gamma_rate(lambda_: float, sigma: float, alpha: float, q: float) -> float:
    rate = 2.0 * lambda_ - sigma**2 - (q + 1.0) * alpha
    if rate <= 0:
        raise ConfigError(
            f"(q+1)*alpha = {(q + 1.0) * alpha:g} must be below 2*lambda - sigma^2 = {2.0 * lambda_ - sigma**2:g}"
        )
    return rate


def gamma_integral(lambda_: float, sigma: float, alpha: float, q: float, mu0: float, t: float) -> float:
    """Adaptive quadrature of int_0^t e^{-(2 lambda - sigma^2) s} mu(s)^{-q-1} ds; t may be inf."""
    rate = _gamma_rate(lambda_, sigma, alpha, q)
    scale = mu0 ** (-q - 1.0)

    # one exponent, so large s underflows to 0 instead of dividing by 0
    def integrand(s: float) -> float:
        return scale * math.exp(-rate * s)

    value, _ = quad(integrand, 0.0, t, epsabs=0.0, epsrel=1e-12, limit=200)
    return float(value)


def gamma_bound(
    lambda_: float,
    sigma: float,
    alpha: float,
    q: float,
    mu0: float,
    t_grid: Optional[Sequence[float]] = None,
) -> float:
    """
    Closed-form supremum over t of the schedule integral for mu_t = mu0 e^{-alpha t}.

    Args:
        lambda_, sigma: Dynamics parameters
        alpha: Schedule decay rate
        q: Smoother exponent
        mu0: Initial smoothing parameter
        t_grid: Optional horizons at which the finite integral is checked by
            quadrature against its closed form

    Returns:
        mu0^{-q-1} / (2 lambda - sigma^2 - (q+1) alpha)
    """
    if mu0 <= 0:
        raise ConfigError("mu0 must be positive")
    rate = _gamma_rate(lambda_, sigma, alpha, q)
    scale = mu0 ** (-q - 1.0)
    bound = scale / rate

    for t in t_grid or ():
        closed = bound if math.isinf(t) else scale * -math.expm1(-rate * t) / rate
        numeric = gamma_integral(lambda_, sigma, alpha, q, mu0, t)
        if abs(numeric - closed) > _QUAD_RTOL * max(abs(closed), 1e-300) or numeric > bound * (1 + _QUAD_RTOL):
            raise NumericalError(f"quadrature {numeric!r} disagrees with closed form {closed!r} at t={t}")
    return bound


def default_epsilon(a: float, beta: float, q: float, delta: float) -> float:
    """e^{-2a - beta delta} / (a/(1-q) + e^{-a - beta delta})."""
    return math.exp(-2.0 * a - beta * delta) / (a / (1.0 - q) + math.exp(-a - beta * delta))


@dataclass(frozen=True)
class ConditionInput:
    """System parameters, smoother constants and initial draws for the checker."""
    beta: float
    lambda_: float
    sigma: float
    mu0: float
    kappa: float
    eta: float
    q: float
    gamma: float
    f_min: float
    f: Callable[[np.ndarray], np.ndarray]
    init_samples: np.ndarray
    mu_bar: Optional[float] = None
    epsilon: Optional[float] = None
    delta: float = 0.01

    def __post_init__(self):
        if self.beta <= 0:
            raise ConfigError("beta must be positive for the condition check")
        if not 2.0 * self.lambda_ > self.sigma**2:
            raise ConfigError(f"2*lambda = {2 * self.lambda_:g} must exceed sigma^2 = {self.sigma**2:g}")
        if not 0.0 <= self.q < 1.0 or self.kappa <= 0 or self.eta <= 0 or self.mu0 <= 0:
            raise ConfigError("smoother constants out of range")
        if np.ndim(self.init_samples) != 3:
            raise ConfigError(f"init_samples must have shape (M, N, d), got {np.shape(self.init_samples)}")

    @property
    def smoothing_term(self) -> float:
        """a = mu0^{1-q} beta kappa."""
        return self.mu0 ** (1.0 - self.q) * self.beta * self.kappa

    @property
    def resolved_mu_bar(self) -> float:
        return self.mu0 if self.mu_bar is None else self.mu_bar

    @property
    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return default_epsilon(self.smoothing_term, self.beta, self.q, self.delta)


class ConditionReport(BaseModel):
    """Every term of the inequality, itemized."""
    beta: float
    epsilon: float
    epsilon_upper: float
    epsilon_source: str
    smoothing_term: float
    f_min: float
    f_tilde_min: float
    gamma: float
    exp_term: float
    exp_term_se: float
    spread_term: float
    spread_term_se: float
    lhs: float
    lhs_se: float
    rhs_smoothing: float
    rhs_spread: float
    rhs: float
    rhs_se: float
    satisfied: bool
    satisfied_with_margin: bool
    error_bound: float
    n_ensembles: int
    n_samples: int


def check_condition(ci: ConditionInput) -> ConditionReport:
    """
    Evaluate both sides of the parameter condition by Monte Carlo over ci.init_samples.

    x_in draws are all M*N rows of init_samples; the spread term averages
    sum_l max_i (x^i_l - xbar_l)^2 over the M ensembles. "Satisfied with
    margin" means the inequality survives moving each side 2 SE against it.
    """
    a = ci.smoothing_term
    eps = ci.resolved_epsilon
    upper = math.exp(-a)
    if not 0.0 < eps < upper:
        raise ConfigError(f"epsilon {eps:g} must lie in (0, e^(-mu0^(1-q) beta kappa)) = (0, {upper:g})")

    samples = np.asarray(ci.init_samples, dtype=float)
    m, n, d = samples.shape
    x_in = samples.reshape(m * n, d)
    fx = np.asarray(ci.f(x_in), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise NumericalError("non-finite objective value among the initial draws")

    f_tilde_min = ci.f_min - ci.kappa * ci.resolved_mu_bar ** (1.0 - ci.q)
    weights = np.exp(ci.beta * (f_tilde_min - fx))
    exp_term = float(weights.mean())
    exp_se = float(weights.std(ddof=1) / math.sqrt(weights.size)) if weights.size > 1 else 0.0

    centred = samples - samples.mean(axis=1, keepdims=True)
    spread = np.sum(np.max(centred**2, axis=1), axis=-1)
    spread_term = float(spread.mean())
    spread_se = float(spread.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0

    lhs_factor = upper - eps
    lhs = lhs_factor * exp_term
    lhs_se = lhs_factor * exp_se
    rhs_smoothing = a / (1.0 - ci.q)
    spread_coeff = ci.gamma * (2.0 * ci.lambda_ + ci.sigma**2) * ci.eta * ci.beta
    rhs_spread = spread_coeff * spread_term
    rhs = rhs_smoothing + rhs_spread
    rhs_se = spread_coeff * spread_se

    log_mean = logsumexp(-ci.beta * fx) - math.log(fx.size)
    error_bound = -log_mean / ci.beta - ci.f_min - math.log(eps) / ci.beta

    report = ConditionReport(
        beta=ci.beta,
        epsilon=eps,
        epsilon_upper=upper,
        epsilon_source="explicit" if ci.epsilon is not None else f"default(delta={ci.delta:g})",
        smoothing_term=a,
        f_min=ci.f_min,
        f_tilde_min=f_tilde_min,
        gamma=ci.gamma,
        exp_term=exp_term,
        exp_term_se=exp_se,
        spread_term=spread_term,
        spread_term_se=spread_se,
        lhs=lhs,
        lhs_se=lhs_se,
        rhs_smoothing=rhs_smoothing,
        rhs_spread=rhs_spread,
        rhs=rhs,
        rhs_se=rhs_se,
        satisfied=lhs >= rhs,
        satisfied_with_margin=lhs - 2.0 * lhs_se >= rhs + 2.0 * rhs_se,
        error_bound=error_bound,
        n_ensembles=m,
        n_samples=m * n,
    )
    logger.info(
        f"Condition at beta={ci.beta:g}: lhs={lhs:.4g} rhs={rhs:.4g} "
        f"satisfied={report.satisfied}, E(beta)={error_bound:.4g}"
    )
    return report


def sample_initial_ensembles(
    init: InitSpec,
    n_particles: int,
    dim: int,
    n_draws: int,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """n_draws independent initial ensembles, shape (n_draws, n_particles, dim)."""
    if n_draws < 1 or n_particles < 1:
        raise ConfigError("n_draws and n_particles must be positive")
    rng = rng or np.random.default_rng()
    return init.sample(rng, n_draws * n_particles, dim).reshape(n_draws, n_particles, dim)


def condition_input_for(
    objective: ObjectiveSpec,
    cfg: SolverConfig,
    init: InitSpec,
    n_draws: int = 150,
    epsilon: Optional[float] = None,
    delta: float = 0.01,
    mu_bar: Optional[float] = None,
) -> ConditionInput:
    """
    Assemble a ConditionInput from a run configuration.

    gamma comes from gamma_bound with the smoother's q; initial ensembles are
    drawn from init with a generator seeded by cfg.seed.
    """
    sm = objective.smoother
    gamma = gamma_bound(cfg.lambda_, cfg.sigma, cfg.alpha, sm.q, cfg.mu0)
    samples = sample_initial_ensembles(
        init, cfg.n_particles, cfg.dim, n_draws, np.random.default_rng(cfg.seed)
    )
    return ConditionInput(
        beta=cfg.beta,
        lambda_=cfg.lambda_,
        sigma=cfg.sigma,
        mu0=cfg.mu0,
        kappa=sm.kappa,
        eta=sm.eta,
        q=sm.q,
        gamma=gamma,
        f_min=objective.f_min,
        f=objective.f,
        init_samples=samples,
        mu_bar=mu_bar,
        epsilon=epsilon,
        delta=delta,
    )


def condition_sweep(ci: ConditionInput, betas: Sequence[float]) -> List[ConditionReport]:
    """check_condition at several beta values with all other inputs fixed."""
    return [check_condition(replace(ci, beta=float(b))) for b in betas]
