"""Data-centred empirical prior: Dirichlet weights and Pareto locations.

The prior is centred on a fitted mixture theta_hat = (w_hat, mu_hat):

    w    ~ Dirichlet(1 + c * w_hat)
    mu_s ~ Pareto(scale=mu_hat_s, shape=delta), independently of w,

so theta_hat is the prior mode and every draw has mu_s >= mu_hat_s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .model import MixtureOfUniforms, open_uniform

C_MULT = 0.01
DELTA_DIV = 20.0


@dataclass(frozen=True)
class Hyperparams:
    c: float
    delta: float

    def __post_init__(self):
        if not (self.c > 0 and self.delta > 0):
            raise ValueError("c and delta must both be positive")


def hyperparams(n: int, c_mult: float = C_MULT, delta_div: float = DELTA_DIV) -> Hyperparams:
    """Default schedule c = c_mult * n^(5/3) / (log n)^(2/3), delta = log(n) / delta_div."""
    if n < 2:
        raise ValueError("the hyperparameter schedule needs n >= 2")
    log_n = math.log(n)
    return Hyperparams(c=c_mult * n ** (5 / 3) / log_n ** (2 / 3), delta=log_n / delta_div)


@dataclass(frozen=True)
class EmpiricalPrior:
    alpha: np.ndarray
    pareto_scales: np.ndarray
    delta: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        scales = np.asarray(self.pareto_scales, dtype=float)
        if alpha.shape != scales.shape or alpha.ndim != 1 or alpha.size == 0:
            raise ValueError("alpha and pareto_scales must be equally long 1-d arrays")
        if np.any(alpha <= 1):
            raise ValueError("every Dirichlet parameter must exceed 1")
        if np.any(scales <= 0):
            raise ValueError("Pareto scales must be positive")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        alpha.setflags(write=False)
        scales.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "pareto_scales", scales)

    @property
    def S(self) -> int:
        return int(self.alpha.size)

    @property
    def c(self) -> float:
        return float(np.sum(self.alpha - 1.0))


def build_prior(theta_hat: MixtureOfUniforms, hp: Hyperparams) -> EmpiricalPrior:
    center = theta_hat.sorted()
    return EmpiricalPrior(
        alpha=1.0 + hp.c * center.weights,
        pareto_scales=center.locations.copy(),
        delta=hp.delta,
    )


def sample_dirichlet(alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_gamma(alpha)
    return g / g.sum()


def sample_pareto(scale, shape, rng: np.random.Generator, size=None) -> np.ndarray:
    """Inverse-CDF draw: scale * U^(-1/shape)."""
    u = open_uniform(rng, np.shape(scale) if size is None else size)
    return scale * u ** (-1.0 / np.asarray(shape, dtype=float))


def sample_prior(prior: EmpiricalPrior, rng: np.random.Generator) -> MixtureOfUniforms:
    w = sample_dirichlet(prior.alpha, rng)
    mu = sample_pareto(prior.pareto_scales, prior.delta, rng)
    return MixtureOfUniforms(w, mu, canonical=False)


def dirichlet_logpdf(w: np.ndarray, alpha: np.ndarray) -> float:
    # degenerate for S=1: the point mass at w=(1,) contributes nothing
    if alpha.size == 1:
        return 0.0
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    norm = gammaln(alpha.sum()) - gammaln(alpha).sum()
    return float(norm + np.sum((alpha - 1.0) * log_w))


def log_prior_density(prior: EmpiricalPrior, theta: MixtureOfUniforms) -> float:
    if theta.S != prior.S:
        raise ValueError(f"theta has {theta.S} components, the prior has {prior.S}")
    mu = theta.locations
    scales = prior.pareto_scales
    if np.any(mu < scales):
        return -np.inf
    d = prior.delta
    pareto = np.sum(math.log(d) + d * np.log(scales) - (d + 1.0) * np.log(mu))
    return dirichlet_logpdf(theta.weights, prior.alpha) + float(pareto)
