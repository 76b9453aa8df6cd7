"""Finite mixtures of Uniform(0, mu) kernels.

Every monotone non-increasing density on (0, inf) is a scale mixture of
uniforms; restricting the mixing measure to S atoms gives a step density
with at most S jumps.  ``MixtureOfUniforms`` holds the (weights, locations)
parametrisation and ``StepDensityView`` the equivalent (knots, heights) one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SUM_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Sample:
    """Positive observations, stored sorted ascending."""

    __slots__ = ("_values",)

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if v.size == 0:
            raise ValueError("a sample needs at least one observation")
        if not np.all(np.isfinite(v)) or v[0] <= 0:
            raise ValueError("observations must be positive and finite")
        self._values = _frozen(v)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    @property
    def max(self) -> float:
        return float(self._values[-1])

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, max={self.max:.6g})"


def as_sample(data) -> Sample:
    return data if isinstance(data, Sample) else Sample(data)


class MixtureOfUniforms:
    """f(x) = sum_s w_s / mu_s * 1(x <= mu_s).

    Parameters
    ----------
    weights, locations : array-like of shape (S,)
        Mixture weights (summing to one) and uniform upper endpoints.
    canonical : bool, default=True
        Sort by location, merge tied locations and drop zero weights.  Pass
        ``False`` for label-bound parameter draws (prior or posterior), where
        component ``s`` must stay component ``s`` and the ordering of the
        locations is arbitrary.
    """

    __slots__ = ("_w", "_mu", "_canonical")

    def __init__(self, weights, locations, canonical: bool = True):
        w = np.asarray(weights, dtype=float).ravel()
        mu = np.asarray(locations, dtype=float).ravel()
        if w.shape != mu.shape:
            raise ValueError("weights and locations must have the same length")
        if w.size == 0:
            raise ValueError("a mixture needs at least one component")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ValueError("locations must be positive and finite")
        total = w.sum()
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        w = w / total
        if canonical:
            keep = w > 0
            w, mu = w[keep], mu[keep]
            mu, inverse = np.unique(mu, return_inverse=True)
            w = np.bincount(inverse, weights=w, minlength=mu.size)
        self._w = _frozen(w)
        self._mu = _frozen(mu)
        self._canonical = canonical

    @property
    def weights(self) -> np.ndarray:
        return self._w

    @property
    def locations(self) -> np.ndarray:
        return self._mu

    @property
    def S(self) -> int:
        return int(self._w.size)

    @property
    def canonical(self) -> bool:
        return self._canonical

    @property
    def support_max(self) -> float:
        return float(self._mu.max())

    @property
    def density_at_zero(self) -> float:
        """Right limit f(0+) = sum_s w_s / mu_s."""
        return float(np.sum(self._w / self._mu))

    def sorted(self) -> "MixtureOfUniforms":
        """Canonical copy (sorted, ties merged, zero weights dropped)."""
        if self._canonical:
            return self
        return MixtureOfUniforms(self._w, self._mu)

    def pdf(self, x) -> np.ndarray:
        """Vectorised density; all points must be positive."""
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("density is evaluated on (0, inf) only")
        knots, heights = _step_arrays(self)
        idx = np.searchsorted(knots, x, side="left")
        return np.append(heights, 0.0)[idx]

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("cdf is defined on [0, inf)")
        ratio = np.minimum(x[..., None] / self._mu, 1.0)
        return ratio @ self._w

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixtureOfUniforms):
            return NotImplemented
        return (
            self.S == other.S
            and np.array_equal(self._w, other._w)
            and np.array_equal(self._mu, other._mu)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"MixtureOfUniforms(weights={self._w.tolist()}, locations={self._mu.tolist()})"


@dataclass(frozen=True)
class StepDensityView:
    """Step form of a monotone density: value ``heights[k]`` on (knots[k-1], knots[k]]."""

    knots: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float).ravel()
        heights = np.asarray(self.heights, dtype=float).ravel()
        if knots.shape != heights.shape or knots.size == 0:
            raise ValueError("knots and heights must be non-empty and equally long")
        if knots[0] <= 0 or np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be positive and strictly increasing")
        if heights[-1] <= 0 or np.any(np.diff(heights) >= 0):
            raise ValueError("heights must be positive and strictly decreasing")
        mass = np.sum(heights * np.diff(knots, prepend=0.0))
        if abs(mass - 1.0) > _SUM_TOL:
            raise ValueError(f"step density has mass {mass!r}, not 1")
        object.__setattr__(self, "knots", _frozen(knots))
        object.__setattr__(self, "heights", _frozen(heights))


def _step_arrays(theta: MixtureOfUniforms) -> tuple[np.ndarray, np.ndarray]:
    t = theta.sorted()
    heights = np.cumsum((t.weights / t.locations)[::-1])[::-1]
    return t.locations, heights


def to_step(theta: MixtureOfUniforms) -> StepDensityView:
    knots, heights = _step_arrays(theta)
    return StepDensityView(knots, heights)


def from_step(view: StepDensityView) -> MixtureOfUniforms:
    h = np.asarray(view.heights, dtype=float)
    tau = np.asarray(view.knots, dtype=float)
    if np.any(np.diff(h) >= 0):
        raise ValueError("step heights must be strictly decreasing")
    w = tau * (h - np.append(h[1:], 0.0))
    return MixtureOfUniforms(w, tau)


def density_eval(theta: MixtureOfUniforms, x: float) -> float:
    if not x > 0:
        raise ValueError(f"density is defined for x > 0, got {x!r}")
    return float(theta.pdf(x))


def cdf_eval(theta: MixtureOfUniforms, x: float) -> float:
    if not x >= 0:
        raise ValueError(f"cdf is defined for x >= 0, got {x!r}")
    return float(theta.cdf(x))


def log_likelihood(theta: MixtureOfUniforms, data) -> float:
    """sum_i log f(X_i); ``-inf`` if some observation lies beyond every location."""
    x = as_sample(data).values
    t = theta.sorted()
    if x[-1] > t.locations[-1]:
        return -np.inf
    # log of the step heights via a reversed running log-sum-exp
    log_terms = np.log(t.weights) - np.log(t.locations)
    log_heights = np.logaddexp.accumulate(log_terms[::-1])[::-1]
    idx = np.searchsorted(t.locations, x, side="left")
    return float(np.sum(log_heights[idx]))


def open_uniform(rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform draws on the open interval (0, 1)."""
    return rng.random(size) + 2.0**-54


def sample_from(theta: MixtureOfUniforms, n: int, rng: np.random.Generator) -> Sample:
    if n < 1:
        raise ValueError("n must be at least 1")
    comp = rng.choice(theta.S, size=n, p=theta.weights)
    return Sample(theta.locations[comp] * open_uniform(rng, n))
