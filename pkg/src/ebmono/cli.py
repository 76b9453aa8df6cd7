"""Command-line front end.

    ebmono grenander --data claims.txt --out fit/
    ebmono fit --data claims.txt --out fit/ --seed 1 --emit-draws
    ebmono simulate --truth exponential --n 100,200 --x 0.5,1,2,3 --reps 200
    ebmono rate --truth exponential --n 100,400,1600 --reps 20

Every command writes ``meta.json`` next to its CSV outputs; passing it back
with ``--config`` reruns the same computation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .experiments import (
    TRUTHS,
    coverage_experiment,
    get_truth,
    loglog_slope,
    rate_study,
    write_csv,
    write_dataclass_rows,
)
from .gibbs import ChainConfig, run_chain
from .grenander import grenander_fit
from .model import Sample, to_step
from .prior import C_MULT, DELTA_DIV, build_prior, hyperparams
from .summaries import DEFAULT_GRID_SIZE, default_grid, pointwise_band

COMMANDS = ("fit", "grenander", "simulate", "rate")


class IngestError(ValueError):
    pass


def ingest(path) -> Sample:
    """Read one positive number per line, or the first column of a CSV.

    A non-numeric first line is taken as a header.  Blank lines are skipped.
    """
    path = Path(path)
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            field = line.split(",")[0].strip()
            try:
                v = float(field)
            except ValueError:
                if lineno == 1:
                    continue
                raise IngestError(f"{path}:{lineno}: not a number: {field!r}") from None
            if not (math.isfinite(v) and v > 0):
                raise IngestError(f"{path}:{lineno}: observations must be positive, got {field!r}")
            values.append(v)
    if not values:
        raise IngestError(f"{path}: no observations found")
    return Sample(values)


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _add_chain_args(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--burnin", type=int, default=d(ChainConfig.burn_in))
    p.add_argument("--iters", type=int, default=d(ChainConfig.iterations))
    p.add_argument("--thin", type=int, default=d(ChainConfig.thin))
    p.add_argument("--level", type=float, default=d(0.95))
    p.add_argument("--c-mult", type=float, default=d(C_MULT))
    p.add_argument("--delta-div", type=float, default=d(DELTA_DIV))


def build_parser(suppress: bool = False) -> argparse.ArgumentParser:
    """Argument parser; ``suppress=True`` omits defaults (to detect explicit flags)."""
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser = argparse.ArgumentParser(
        prog="ebmono", description="Empirical-Bayes inference for monotone densities."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("fit", "grenander"):
        p = sub.add_parser(name)
        p.add_argument("--data", default=d(None), help="one value per line, or CSV")
        p.add_argument("--out", default=d("out"))
        p.add_argument("--config", default=d(None), help="meta.json of an earlier run")
        if name == "fit":
            _add_chain_args(p, suppress)
            p.add_argument("--grid", type=int, default=d(DEFAULT_GRID_SIZE))
            p.add_argument("--emit-draws", action="store_true", default=d(False))

    for name in ("simulate", "rate"):
        p = sub.add_parser(name)
        p.add_argument("--truth", default=d("exponential"), help=f"one of {sorted(TRUTHS)}")
        p.add_argument("--n", type=_int_list, default=d([100]))
        if name == "simulate":
            p.add_argument("--x", type=_float_list, default=d([1.0]))
        p.add_argument("--reps", type=int, default=d(200 if name == "simulate" else 20))
        p.add_argument("--workers", type=int, default=d(1))
        p.add_argument("--out", default=d("out"))
        p.add_argument("--config", default=d(None), help="meta.json of an earlier run")
        _add_chain_args(p, suppress)
    return parser


def resolve_config(argv: list[str]) -> dict:
    """Defaults, then values from ``--config``, then explicit flags."""
    full = vars(build_parser().parse_args(argv))
    explicit = vars(build_parser(suppress=True).parse_args(argv))
    cfg = dict(full)
    if full.get("config"):
        with open(full["config"]) as fh:
            stored = json.load(fh)["config"]
        if stored.get("command") != full["command"]:
            raise ValueError(
                f"{full['config']} is for {stored.get('command')!r}, not {full['command']!r}"
            )
        cfg.update({k: v for k, v in stored.items() if k in cfg})
    cfg.update(explicit)
    cfg.pop("config", None)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["command"] in ("fit", "grenander") and not cfg.get("data"):
        raise ValueError(f"{cfg['command']} needs --data")
    if not cfg.get("out"):
        raise ValueError("--out must be a non-empty path")
    if "level" in cfg and not 0 < cfg["level"] < 1:
        raise ValueError("--level must lie in (0, 1)")
    if "truth" in cfg:
        get_truth(cfg["truth"])


def _chain(cfg: dict) -> ChainConfig:
    return ChainConfig(
        burn_in=cfg["burnin"], iterations=cfg["iters"], thin=cfg["thin"], seed=cfg["seed"]
    )


def _grenander_rows(theta):
    view = to_step(theta)
    return zip(view.knots, view.heights, theta.weights, theta.locations)


GRENANDER_HEADER = ("knot", "height", "weight", "location")


def grenander_command(cfg: dict):
    data = ingest(cfg["data"])
    theta = grenander_fit(data)

    def write(out: Path):
        write_csv(out / "grenander.csv", GRENANDER_HEADER, _grenander_rows(theta))

    return {"n": data.n, "S": theta.S}, ["grenander.csv"], write


def fit_command(cfg: dict):
    data = ingest(cfg["data"])
    theta_hat = grenander_fit(data)
    hp = hyperparams(data.n, cfg["c_mult"], cfg["delta_div"])
    prior = build_prior(theta_hat, hp)
    chain = _chain(cfg)
    draws = run_chain(prior, theta_hat, data, chain)
    grid = default_grid(data.max, cfg["grid"])
    band = pointwise_band(draws, grid, cfg["level"]) if len(draws) >= 2 else None

    def write(out: Path):
        write_csv(out / "grenander.csv", GRENANDER_HEADER, _grenander_rows(theta_hat))
        if band is not None:
            write_csv(
                out / "band.csv",
                ("x", "mean", "lower", "upper"),
                zip(band.grid, band.mean, band.lower, band.upper),
            )
        if cfg["emit_draws"]:
            S = draws.S
            rows = (
                (k, s, draws.weights[k, s], draws.locations[k, s])
                for k in range(len(draws))
                for s in range(S)
            )
            write_csv(out / "draws.csv", ("draw", "component", "weight", "location"), rows)

    files = ["grenander.csv"]
    if band is not None:
        files.append("band.csv")
    if cfg["emit_draws"]:
        files.append("draws.csv")
    meta = {
        "n": data.n,
        "S": theta_hat.S,
        "c": hp.c,
        "delta": hp.delta,
        "seed": chain.seed,
        "chain": asdict(chain),
        "draws": len(draws),
    }
    return meta, files, write


def simulate_command(cfg: dict):
    spec = get_truth(cfg["truth"])
    report = coverage_experiment(
        spec,
        cfg["n"],
        cfg["x"],
        cfg["reps"],
        _chain(cfg),
        cfg["seed"],
        level=cfg["level"],
        c_mult=cfg["c_mult"],
        delta_div=cfg["delta_div"],
        workers=cfg["workers"],
    )

    def write(out: Path):
        write_dataclass_rows(out / "coverage.csv", report.rows)

    return {"truth": spec.name, "rows": len(report.rows)}, ["coverage.csv"], write


def rate_command(cfg: dict):
    spec = get_truth(cfg["truth"])
    rows = rate_study(
        spec,
        cfg["n"],
        cfg["reps"],
        _chain(cfg),
        cfg["seed"],
        c_mult=cfg["c_mult"],
        delta_div=cfg["delta_div"],
        workers=cfg["workers"],
    )

    def write(out: Path):
        write_dataclass_rows(out / "rate.csv", rows)

    summary = {"truth": spec.name, "M": rows[0].M, "loglog_slope": loglog_slope(rows)}
    return summary, ["rate.csv"], write


HANDLERS = {
    "fit": fit_command,
    "grenander": grenander_command,
    "simulate": simulate_command,
    "rate": rate_command,
}


def _publish(out: Path, files: list[str], write, meta: dict) -> None:
    # write into a scratch directory first so a failure leaves nothing behind
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=out, prefix=".partial-") as tmp:
        tmp = Path(tmp)
        write(tmp)
        with open(tmp / "meta.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        for name in files + ["meta.json"]:
            os.replace(tmp / name, out / name)


def run(cfg: dict) -> Path:
    _validate(cfg)
    start = time.perf_counter()
    summary, files, write = HANDLERS[cfg["command"]](cfg)
    meta = {
        "version": __version__,
        "config": cfg,
        "outputs": files,
        **summary,
        "wall_clock_seconds": round(time.perf_counter() - start, 3),
    }
    out = Path(cfg["out"])
    _publish(out, files, write, meta)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = resolve_config(argv)
        out = run(cfg)
    except (OSError, ValueError) as exc:
        print(f"ebmono: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
