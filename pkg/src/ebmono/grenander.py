"""Grenander estimator via the least concave majorant of the empirical CDF."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MixtureOfUniforms, StepDensityView, as_sample, from_step


@dataclass(frozen=True)
class EcdfPoints:
    """Distinct sorted observations with cumulative counts; (0, 0) is implicit."""

    x: np.ndarray
    counts: np.ndarray  # cumulative, integer
    n: int

    @property
    def F(self) -> np.ndarray:
        return self.counts / self.n


@dataclass(frozen=True)
class ConcaveMajorant:
    """Vertices of the LCM, starting at (0, 0) and ending at (X_(n), 1)."""

    x: np.ndarray
    F: np.ndarray

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.F) / np.diff(self.x)

    def __call__(self, t) -> np.ndarray:
        return np.interp(t, self.x, self.F)


def empirical_cdf(data) -> EcdfPoints:
    values = as_sample(data).values
    x, mult = np.unique(values, return_counts=True)
    return EcdfPoints(x=x, counts=np.cumsum(mult), n=values.size)


def _hull_indices(x: np.ndarray, c: np.ndarray) -> list[int]:
    # Upper hull of (0,0) + points in one left-to-right pass.  Cumulative
    # counts are integers so exactly collinear vertices are detected and
    # dropped, which keeps the slope sequence strictly decreasing.
    px = np.concatenate(([0.0], x))
    pc = np.concatenate(([0], c))
    hull = [0]
    for k in range(1, px.size):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # j is kept only if it lies strictly above the chord i -> k
            lhs = (pc[j] - pc[i]) * (px[k] - px[i])
            rhs = (pc[k] - pc[i]) * (px[j] - px[i])
            if lhs > rhs:
                break
            hull.pop()
        hull.append(k)
    return hull


def least_concave_majorant(ecdf: EcdfPoints) -> ConcaveMajorant:
    hull = _hull_indices(ecdf.x, ecdf.counts)
    px = np.concatenate(([0.0], ecdf.x))
    pF = np.concatenate(([0.0], ecdf.F))
    vx, vF = px[hull], pF[hull]
    # near-collinear vertices can still round to non-decreasing float slopes
    while vx.size > 2:
        flat = np.flatnonzero(np.diff(np.diff(vF) / np.diff(vx)) >= 0)
        if flat.size == 0:
            break
        vx, vF = np.delete(vx, flat[0] + 1), np.delete(vF, flat[0] + 1)
    return ConcaveMajorant(x=vx, F=vF)


def grenander_step(data) -> StepDensityView:
    lcm = least_concave_majorant(empirical_cdf(data))
    return StepDensityView(lcm.x[1:], lcm.slopes)


def grenander_fit(data) -> MixtureOfUniforms:
    """Grenander estimator as an exact mixture of uniforms.

    The knots are the LCM vertices and the heights its left derivatives, so
    the largest location is always the sample maximum.
    """
    return from_step(grenander_step(data))
