"""Monte Carlo coverage and contraction studies under known monotone truths."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erf

from .gibbs import ChainConfig, PosteriorDraws, run_chain
from .grenander import grenander_fit
from .model import Sample, open_uniform
from .prior import C_MULT, DELTA_DIV, build_prior, hyperparams
from .summaries import interval_at, l1_distance, l1_steps_vs_monotone, posterior_mean_mixture

LEVEL = 0.95


@dataclass(frozen=True)
class TruthSpec:
    name: str
    tag: int
    pdf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    draw: Callable[[np.random.Generator, int], np.ndarray]
    mean: float


def _exp_pdf(x):
    return np.exp(-np.asarray(x, dtype=float))


def _exp_cdf(x):
    return -np.expm1(-np.asarray(x, dtype=float))


def _exp_draw(rng, n):
    return -np.log(open_uniform(rng, n))


def _halfnormal_pdf(x):
    return math.sqrt(2 / math.pi) * np.exp(-0.5 * np.asarray(x, dtype=float) ** 2)


def _halfnormal_cdf(x):
    return erf(np.asarray(x, dtype=float) / math.sqrt(2))


def _halfnormal_draw(rng, n):
    return np.abs(rng.standard_normal(n))


EXPONENTIAL = TruthSpec(
    name="exponential",
    tag=1,
    pdf=_exp_pdf,
    cdf=_exp_cdf,
    draw=_exp_draw,
    mean=1.0,
)

HALF_NORMAL = TruthSpec(
    name="halfnormal",
    tag=2,
    pdf=_halfnormal_pdf,
    cdf=_halfnormal_cdf,
    draw=_halfnormal_draw,
    mean=math.sqrt(2 / math.pi),
)

TRUTHS = {t.name: t for t in (EXPONENTIAL, HALF_NORMAL)}


def get_truth(name: str) -> TruthSpec:
    try:
        return TRUTHS[name]
    except KeyError:
        valid = ", ".join(sorted(TRUTHS))
        raise ValueError(f"unknown truth {name!r}; valid names: {valid}") from None


def gen_truth(spec: TruthSpec, n: int, rng: np.random.Generator) -> Sample:
    if n < 1:
        raise ValueError("n must be at least 1")
    return Sample(spec.draw(rng, n))


def replication_streams(seed: int, spec: TruthSpec, n: int, rep: int):
    """Data generator and chain seed for one (truth, n, replication) cell."""
    ss = np.random.SeedSequence([seed, spec.tag, n, rep])
    data_ss, chain_ss = ss.spawn(2)
    chain_seed = int(chain_ss.generate_state(1, dtype=np.uint64)[0])
    return np.random.default_rng(data_ss), chain_seed


def fit_posterior(
    data: Sample,
    chain: ChainConfig,
    c_mult: float = C_MULT,
    delta_div: float = DELTA_DIV,
) -> PosteriorDraws:
    """Grenander fit -> empirical prior -> Gibbs chain."""
    theta_hat = grenander_fit(data)
    prior = build_prior(theta_hat, hyperparams(data.n, c_mult, delta_div))
    return run_chain(prior, theta_hat, data, chain)


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# --- coverage -------------------------------------------------------------


@dataclass(frozen=True)
class CoverageRow:
    n: int
    x: float
    coverage: float
    mean_length: float
    replications: int
    mc_std_err: float


@dataclass(frozen=True)
class CoverageReport:
    truth: str
    level: float
    rows: tuple[CoverageRow, ...]

    def row(self, n: int, x: float) -> CoverageRow:
        for r in self.rows:
            if r.n == n and r.x == x:
                return r
        raise KeyError((n, x))


def _coverage_job(job):
    spec, n, rep, x_list, chain, seed, c_mult, delta_div, level = job
    rng, chain_seed = replication_streams(seed, spec, n, rep)
    data = gen_truth(spec, n, rng)
    draws = fit_posterior(data, replace(chain, seed=chain_seed), c_mult, delta_div)
    out = []
    for x in x_list:
        lo, hi = interval_at(draws, x, level)
        target = float(spec.pdf(x))
        out.append((lo <= target <= hi, hi - lo))
    return out


def coverage_experiment(
    spec: TruthSpec,
    n_list: Sequence[int],
    x_list: Sequence[float],
    replications: int,
    chain: ChainConfig = ChainConfig(),
    seed: int = 0,
    *,
    level: float = LEVEL,
    c_mult: float = C_MULT,
    delta_div: float = DELTA_DIV,
    workers: int = 1,
) -> CoverageReport:
    """Frequentist coverage and mean length of pointwise credible intervals.

    One chain per (n, replication) serves every x.  The chain seed in
    ``chain`` is ignored: each replication derives its own streams from
    ``(seed, truth, n, replication)``.
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    x_list = [float(x) for x in x_list]
    if any(x <= 0 for x in x_list):
        raise ValueError("evaluation points must be positive")
    rows = []
    for n in n_list:
        jobs = [
            (spec, n, rep, x_list, chain, seed, c_mult, delta_div, level)
            for rep in range(replications)
        ]
        results = _map(_coverage_job, jobs, workers)
        for j, x in enumerate(x_list):
            covered = sum(bool(r[j][0]) for r in results)
            lengths = [r[j][1] for r in results]
            p = covered / replications
            rows.append(
                CoverageRow(
                    n=int(n),
                    x=x,
                    coverage=p,
                    mean_length=float(np.mean(lengths)),
                    replications=replications,
                    mc_std_err=math.sqrt(p * (1 - p) / replications),
                )
            )
    return CoverageReport(truth=spec.name, level=level, rows=tuple(rows))


# --- contraction rate -----------------------------------------------------


def contraction_rate(n: int) -> float:
    """(log n)^(1/3) n^(-1/3)."""
    return (math.log(n) / n) ** (1 / 3)


def draw_l1_distances(draws: PosteriorDraws, spec: TruthSpec) -> np.ndarray:
    """d(f*, f_theta) for every retained draw, vectorised over draws."""
    order = np.argsort(draws.locations, axis=1)
    knots = np.take_along_axis(draws.locations, order, axis=1)
    w = np.take_along_axis(draws.weights, order, axis=1)
    heights = np.cumsum((w / knots)[:, ::-1], axis=1)[:, ::-1]
    return l1_steps_vs_monotone(knots, heights, spec)


@dataclass(frozen=True)
class RateRow:
    n: int
    eps_n: float
    mean_l1: float
    mean_mass_outside: float
    M: float
    replications: int


def _rate_job(job):
    spec, n, rep, chain, seed, c_mult, delta_div = job
    rng, chain_seed = replication_streams(seed, spec, n, rep)
    data = gen_truth(spec, n, rng)
    draws = fit_posterior(data, replace(chain, seed=chain_seed), c_mult, delta_div)
    mean_fit = posterior_mean_mixture(draws)
    return l1_distance(mean_fit, spec), draw_l1_distances(draws, spec)


def rate_study(
    spec: TruthSpec,
    n_list: Sequence[int],
    replications: int,
    chain: ChainConfig = ChainConfig(),
    seed: int = 0,
    *,
    c_mult: float = C_MULT,
    delta_div: float = DELTA_DIV,
    workers: int = 1,
) -> list[RateRow]:
    """L1 error of the posterior mean and posterior mass outside M * eps_n.

    M is calibrated once, at the smallest n, as the median of
    d(f*, f_theta) / eps_n over all draws pooled across replications, so the
    mass outside the ball starts near one half.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing with at least three entries")
    if replications < 1:
        raise ValueError("replications must be at least 1")
    per_n = []
    for n in n_list:
        jobs = [(spec, n, rep, chain, seed, c_mult, delta_div) for rep in range(replications)]
        per_n.append(_map(_rate_job, jobs, workers))
    pooled = np.concatenate([d for _, d in per_n[0]])
    M = float(np.median(pooled / contraction_rate(n_list[0])))
    rows = []
    for n, results in zip(n_list, per_n):
        eps = contraction_rate(n)
        rows.append(
            RateRow(
                n=n,
                eps_n=eps,
                mean_l1=float(np.mean([l1 for l1, _ in results])),
                mean_mass_outside=float(np.mean([np.mean(d > M * eps) for _, d in results])),
                M=M,
                replications=replications,
            )
        )
    return rows


def loglog_slope(rows: Iterable[RateRow]) -> float:
    rows = list(rows)
    n = np.log([r.n for r in rows])
    err = np.log([r.mean_l1 for r in rows])
    return float(np.polyfit(n, err, 1)[0])


# --- CSV ------------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def write_dataclass_rows(path, rows: Sequence) -> None:
    if not rows:
        raise ValueError("nothing to write")
    names = [f.name for f in fields(rows[0])]
    write_csv(path, names, ([getattr(r, k) for k in names] for r in rows))
