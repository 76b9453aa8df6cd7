"""Conjugate Gibbs sampler for the posterior under the empirical prior.

With latent labels z_i every full conditional is exact:

    z_i | w, mu   ~ Categorical(w_s / mu_s * 1(X_i <= mu_s))
    w   | z       ~ Dirichlet(alpha + counts)
    mu_s | z      ~ Pareto(max(mu_hat_s, max{X_i : z_i = s}), delta + n_s)

The last component always has mu_S >= mu_hat_S = X_(n), so every point has at
least one feasible label and the chain never leaves the likelihood support.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import MixtureOfUniforms, Sample, as_sample
from .prior import EmpiricalPrior, sample_dirichlet, sample_pareto


@dataclass(frozen=True)
class ChainConfig:
    burn_in: int = 1000
    iterations: int = 2000
    thin: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def n_draws(self) -> int:
        return self.iterations // self.thin


@dataclass(frozen=True)
class GibbsState:
    """Current parameter plus latent labels.

    ``allocations`` holds 0-based component indices; ``cluster_max`` is NaN for
    empty components.
    """

    theta: MixtureOfUniforms
    allocations: np.ndarray
    counts: np.ndarray
    cluster_max: np.ndarray


@dataclass(frozen=True)
class PosteriorDraws:
    """Retained draws stored as (n_draws, S) arrays of weights and locations."""

    weights: np.ndarray
    locations: np.ndarray
    config: ChainConfig = field(default_factory=ChainConfig)

    def __post_init__(self):
        if self.weights.shape != self.locations.shape or self.weights.ndim != 2:
            raise ValueError("weights and locations must be matching 2-d arrays")
        for a in (self.weights, self.locations):
            a.setflags(write=False)

    def __len__(self) -> int:
        return self.weights.shape[0]

    def __getitem__(self, k) -> MixtureOfUniforms:
        return MixtureOfUniforms(self.weights[k], self.locations[k], canonical=False)

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @property
    def S(self) -> int:
        return self.weights.shape[1]

    def pdf(self, x) -> np.ndarray:
        """Densities of every draw at the points x, shape (n_draws, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x <= 0):
            raise ValueError("density is evaluated on (0, inf) only")
        out = np.empty((len(self), x.size))
        ratio = self.weights / self.locations
        for j, xj in enumerate(x):
            out[:, j] = np.where(self.locations >= xj, ratio, 0.0).sum(axis=1)
        return out


def _allocate(x, w, mu, rng):
    with np.errstate(divide="ignore"):
        log_p = np.log(w) - np.log(mu)
    masked = np.where(x[:, None] <= mu[None, :], log_p[None, :], -np.inf)
    p = np.exp(masked - masked.max(axis=1, keepdims=True))
    cum = np.cumsum(p, axis=1)
    u = rng.random(x.size) * cum[:, -1]
    return np.minimum((cum <= u[:, None]).sum(axis=1), mu.size - 1)


def _tally(x, z, S):
    counts = np.bincount(z, minlength=S)
    cmax = np.zeros(S)
    np.maximum.at(cmax, z, x)
    return counts, cmax


def _update_params(x, z, alpha, scales, delta, rng):
    counts, cmax = _tally(x, z, alpha.size)
    w = sample_dirichlet(alpha + counts, rng)
    mu = sample_pareto(np.maximum(scales, cmax), delta + counts, rng)
    return w, mu


def _state(x, w, mu, z) -> GibbsState:
    counts, cmax = _tally(x, z, w.size)
    cmax[counts == 0] = np.nan
    return GibbsState(
        theta=MixtureOfUniforms(w, mu, canonical=False),
        allocations=z,
        counts=counts,
        cluster_max=cmax,
    )


def init_state(
    prior: EmpiricalPrior, theta_hat: MixtureOfUniforms, data, rng: np.random.Generator
) -> GibbsState:
    """Start at the prior centre with labels drawn from their conditional."""
    x = as_sample(data).values
    center = theta_hat.sorted()
    if center.S != prior.S or not np.array_equal(center.locations, prior.pareto_scales):
        raise ValueError("theta_hat is not the centre of this prior")
    if x[-1] > center.support_max:
        raise ValueError("some observations exceed the largest location of theta_hat")
    z = _allocate(x, center.weights, center.locations, rng)
    return _state(x, center.weights, center.locations, z)


def gibbs_sweep(
    state: GibbsState, prior: EmpiricalPrior, data, rng: np.random.Generator
) -> GibbsState:
    """One systematic scan: labels, then weights, then locations."""
    x = as_sample(data).values
    z = _allocate(x, state.theta.weights, state.theta.locations, rng)
    w, mu = _update_params(x, z, prior.alpha, prior.pareto_scales, prior.delta, rng)
    return _state(x, w, mu, z)


def run_chain(
    prior: EmpiricalPrior,
    theta_hat: MixtureOfUniforms,
    data,
    config: ChainConfig = ChainConfig(),
) -> PosteriorDraws:
    data = as_sample(data)
    x = data.values
    rng = np.random.default_rng(config.seed)
    state = init_state(prior, theta_hat, data, rng)
    w = np.array(state.theta.weights)
    mu = np.array(state.theta.locations)
    alpha, scales, delta = prior.alpha, prior.pareto_scales, prior.delta

    keep_w = np.empty((config.n_draws, prior.S))
    keep_mu = np.empty_like(keep_w)
    kept = 0
    for it in range(config.burn_in + config.iterations):
        z = _allocate(x, w, mu, rng)
        w, mu = _update_params(x, z, alpha, scales, delta, rng)
        post = it - config.burn_in + 1
        if post > 0 and post % config.thin == 0:
            keep_w[kept] = w
            keep_mu[kept] = mu
            kept += 1
    return PosteriorDraws(keep_w, keep_mu, config)
