"""``spiselect`` command line.

Every subcommand reads and writes plain files (or stdout) so runs can be
scripted and diffed. Exit codes: 0 success, 2 usage, 3 bad data or I/O,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import dynamics
from .errors import DataError, NumericalError, SpiError
from .forecast import HORIZON_MODES, TRAIN_FRACTION, ForecastConfig, rolling_forecast
from .heuristics import (AMI_BINS, FNN_ATOL, FNN_RTOL, FNN_THRESHOLD, ami_first_minimum_tau,
                         fnn_dimension)
from .infotheory import DEFAULT_K, DEFAULT_SEED, ESTIMATORS, SpiRequest, spi
from .io import dump_json, fmt, grid_summary, load_timeseries_csv, write_heatmap_csv
from .io import write_timeseries_csv
from .sweep import PLATEAU_FRACTION, data_length_curve, grid_sweep, horizon_curves
from .timeseries import ReconstructionParams

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


def int_range(text: str) -> list[int]:
    """``"3"``, ``"2..15"`` (inclusive) or ``"1,2,5"``; pieces may be mixed."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                a, b = (int(v) for v in part.split(".."))
                if b < a:
                    raise argparse.ArgumentTypeError(f"empty range {part!r}")
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer range: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty range")
    return out


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def seed_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _emit(text: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _split(n_total: int, fraction: float) -> tuple[int, int]:
    if not 0 < fraction < 1:
        raise UsageError("--train-fraction must lie strictly between 0 and 1")
    n = int(round(fraction * n_total))
    return n, n_total - n


# ---------------------------------------------------------------- generate

_SYSTEM_FLAGS = {
    "lorenz63": {"sigma": "sigma", "rho": "rho", "beta": "beta"},
    "lorenz96": {"k": "K", "f": "F"},
    "henon": {"a": "a", "b": "b"},
    "logistic": {"r": "r"},
}


def cmd_generate(args):
    params = dynamics.default_params(args.system)
    for flag, key in _SYSTEM_FLAGS[args.system].items():
        v = getattr(args, flag)
        if v is not None:
            params[key] = v
    for flag in ("sigma", "rho", "beta", "k", "f", "a", "b", "r"):
        if getattr(args, flag) is not None and flag not in _SYSTEM_FLAGS[args.system]:
            raise UsageError(f"--{flag} does not apply to {args.system}")
    if args.system == "lorenz96":
        params["K"] = int(params["K"])
    x0 = (np.array(args.x0) if args.x0 is not None
          else dynamics.default_initial_state(args.system, params))
    if args.perturb:
        rng = np.random.default_rng(args.seed)
        x0 = x0 + args.perturb * rng.standard_normal(x0.shape)
    protocol = dynamics.GenerationProtocol(args.steps, args.discard, args.dt,
                                           args.observable, tuple(float(v) for v in x0))
    ts = dynamics.generate_benchmark_trace(args.system, protocol, params)
    sidecar = {
        "system": args.system,
        "parameters": params,
        "protocol": {"total_steps": args.steps, "discard": args.discard,
                     "dt": ts.sample_step, "observable_index": args.observable,
                     "integrator": "rk4" if args.system in ("lorenz63", "lorenz96") else "map"},
        "initial_state": list(x0),
        "perturb": args.perturb,
        "seed": args.seed,
        "n_samples": len(ts),
    }
    write_timeseries_csv(ts, args.out, sidecar)
    print(f"wrote {len(ts)} samples to {args.out}", file=sys.stderr)


# ---------------------------------------------------------------- spi

def cmd_spi(args):
    ts = load_timeseries_csv(args.input)
    req = SpiRequest(ReconstructionParams(args.m, args.tau, args.p), args.knn,
                     args.estimator, args.bandwidth, args.seed)
    est = spi(ts, req)
    out = {"value_nats": est.value, "value_bits": est.bits, "estimator": est.estimator,
           "n_samples": est.n_samples, "m": args.m, "tau": args.tau, "p": args.p,
           ("k" if est.estimator == "ksg2" else "bandwidth"): est.k_or_r}
    _emit(dump_json(out), args.out)


# ---------------------------------------------------------------- sweep

def _forecast_config(args) -> ForecastConfig:
    return ForecastConfig(args.neighbors, args.exclusion, not args.frozen_library,
                          args.horizon_mode)


def cmd_sweep(args):
    ts = load_timeseries_csv(args.input)
    n_train, n_test = _split(len(ts), args.train_fraction)
    grid = grid_sweep(ts, args.m, args.tau, args.p, compute_mase=args.mase,
                      config=_forecast_config(args), k=args.knn, n_train=n_train,
                      n_test=n_test, workers=args.threads, seed=args.seed)
    write_heatmap_csv(grid, args.out)
    if args.json:
        dump_json(grid_summary(grid, args.plateau), args.json)
    for m, tau, msg in grid.failures:
        print(f"cell m={m} tau={tau} failed: {msg}", file=sys.stderr)
    if np.isnan(grid.spi).all():
        raise DataError("every cell in the grid failed")


# ---------------------------------------------------------------- heuristics

def _write_curve(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([a, fmt(b)] for a, b in rows)


def cmd_heuristics(args):
    ts = load_timeseries_csv(args.input)
    ami = ami_first_minimum_tau(ts, args.tau_max, args.bins)
    out = {"ami": {"tau": ami.value, "status": ami.status, "bins": args.bins}}
    if args.ami_csv:
        _write_curve(args.ami_csv, ["tau", "ami"], ami.diagnostic_curve)
    tau_for_fnn = args.fnn_tau or ami.value
    if tau_for_fnn is None:
        out["fnn"] = {"m": None, "status": "failed", "tau": None,
                      "reason": "no delay available: AMI failed and --fnn-tau not given"}
    else:
        fnn = fnn_dimension(ts, tau_for_fnn, args.m_max, args.rtol, args.atol, args.fnn_threshold)
        out["fnn"] = {"m": fnn.value, "status": fnn.status, "tau": tau_for_fnn}
        if args.fnn_csv:
            _write_curve(args.fnn_csv, ["m", "fnn_fraction"], fnn.diagnostic_curve)
    _emit(dump_json(out), args.json)


# ---------------------------------------------------------------- forecast

def cmd_forecast(args):
    ts = load_timeseries_csv(args.input)
    n, k = _split(len(ts), args.train_fraction)
    config = _forecast_config(args)
    params = ReconstructionParams(args.m, args.tau, args.p)
    res = rolling_forecast(ts, params, n, k, config)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "prediction", "truth"])
            w.writerows([n + i, fmt(a), fmt(b)] for i, (a, b) in enumerate(zip(res.predictions, res.truth)))
    summary = {
        "params": {"m": args.m, "tau": args.tau, "p": args.p},
        "config": {"num_neighbors": config.num_neighbors,
                   "exclusion_window": config.window(params),
                   "rebuild_every_step": config.rebuild_every_step,
                   "horizon_mode": config.horizon_mode},
        "n_train": n,
        "n_test": k,
        "mase": res.mase,
    }
    _emit(dump_json(summary), args.json)


# ---------------------------------------------------------------- horizon / datalength

def _write_points(path, header, rows):
    has_err = any(r[-1] for r in rows)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header + (["error"] if has_err else []))
        for r in rows:
            *keys, value, err = r
            w.writerow(keys + [fmt(value)] + ([err or ""] if has_err else []))


def cmd_horizon(args):
    ts = load_timeseries_csv(args.input)
    pts = horizon_curves(ts, args.p, args.m, args.tau, args.knn, args.threads, args.seed)
    _write_points(args.out, ["p", "m", "tau", "spi"], [tuple(pt) for pt in pts])
    if all(math.isnan(pt.spi) for pt in pts):
        raise DataError("every horizon point failed")


def cmd_datalength(args):
    if args.input:
        source = load_timeseries_csv(args.input)
    else:
        params = dynamics.default_params(args.system)
        if args.system == "lorenz96":
            if args.k is not None:
                params["K"] = args.k
            if args.f is not None:
                params["F"] = args.f

        def source(n):
            protocol = dynamics.GenerationProtocol(n + args.discard, args.discard)
            return dynamics.generate_benchmark_trace(args.system, protocol, params)
    pts = data_length_curve(source, args.lengths, args.m, args.tau, args.p, args.knn,
                            args.threads, args.seed)
    _write_points(args.out, ["length", "m", "spi"], [tuple(pt) for pt in pts])
    if all(math.isnan(pt.spi) for pt in pts):
        raise DataError("every data-length point failed")


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spiselect",
        description="Select delay-reconstruction parameters by shared predictive information.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, threads=False):
        p.add_argument("--seed", type=seed_int, default=DEFAULT_SEED,
                       help="seed for duplicate-breaking jitter and perturbations (default 42)")
        if threads:
            p.add_argument("--threads", type=positive_int, default=os.cpu_count() or 1,
                           help="worker threads for cell evaluation (default: all CPUs)")

    def knn(p):
        p.add_argument("--knn", type=positive_int, default=DEFAULT_K,
                       help="neighbours for the KSG estimator (default 4)")

    def forecast_flags(p):
        p.add_argument("--neighbors", type=positive_int, default=1,
                       help="analogues averaged per forecast (default 1)")
        p.add_argument("--exclusion", type=int, default=None,
                       help="temporal exclusion window (default (m-1)*tau + p)")
        p.add_argument("--frozen-library", action="store_true",
                       help="only use training-segment analogues")
        p.add_argument("--horizon-mode", choices=HORIZON_MODES, default="direct_p_step")
        p.add_argument("--train-fraction", type=float, default=TRAIN_FRACTION)

    g = sub.add_parser("generate", help="simulate a benchmark system and write its trace")
    g.add_argument("--system", choices=dynamics.SYSTEMS, required=True)
    g.add_argument("--k", type=positive_int, help="Lorenz 96 dimension K")
    g.add_argument("--f", type=float, help="Lorenz 96 forcing F")
    g.add_argument("--sigma", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--a", type=float, help="Henon a")
    g.add_argument("--b", type=float, help="Henon b")
    g.add_argument("--r", type=float, help="logistic r")
    g.add_argument("--steps", type=positive_int, default=dynamics.TOTAL_STEPS)
    g.add_argument("--discard", type=int, default=dynamics.DISCARD)
    g.add_argument("--dt", type=float, default=None,
                   help="step size (flows default to 0.015625, i.e. 1/64)")
    g.add_argument("--observable", type=int, default=0)
    g.add_argument("--x0", type=float_list, default=None, help="comma-separated initial state")
    g.add_argument("--perturb", type=float, default=0.0,
                   help="std of seeded Gaussian noise added to the initial state")
    g.add_argument("--out", required=True)
    common(g)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("spi", help="estimate SPI for one (m, tau, p)")
    s.add_argument("--input", required=True)
    s.add_argument("--m", type=positive_int, required=True)
    s.add_argument("--tau", type=positive_int, default=1)
    s.add_argument("--p", type=positive_int, default=1)
    knn(s)
    s.add_argument("--estimator", choices=ESTIMATORS, default="ksg2")
    s.add_argument("--bandwidth", type=float, default=None, help="box-kernel radius")
    s.add_argument("--out", default=None, help="write JSON here instead of stdout")
    common(s)
    s.set_defaults(func=cmd_spi)

    w = sub.add_parser("sweep", help="SPI (and MASE) over an (m, tau) grid")
    w.add_argument("--input", required=True)
    w.add_argument("--m", type=int_range, required=True)
    w.add_argument("--tau", type=int_range, required=True)
    w.add_argument("--p", type=positive_int, default=1)
    w.add_argument("--mase", action="store_true", help="also run the forecast in every cell")
    knn(w)
    forecast_flags(w)
    w.add_argument("--plateau", type=float, default=PLATEAU_FRACTION)
    w.add_argument("--out", required=True, help="long-form heatmap CSV")
    w.add_argument("--json", default=None, help="matrices and selection as JSON")
    common(w, threads=True)
    w.set_defaults(func=cmd_sweep)

    h = sub.add_parser("heuristics", help="AMI delay and FNN dimension")
    h.add_argument("--input", required=True)
    h.add_argument("--tau-max", type=positive_int, default=100)
    h.add_argument("--bins", type=positive_int, default=AMI_BINS)
    h.add_argument("--m-max", type=positive_int, default=15)
    h.add_argument("--fnn-tau", type=positive_int, default=None,
                   help="delay for FNN (default: the AMI result)")
    h.add_argument("--rtol", type=float, default=FNN_RTOL)
    h.add_argument("--atol", type=float, default=FNN_ATOL)
    h.add_argument("--fnn-threshold", type=float, default=FNN_THRESHOLD)
    h.add_argument("--ami-csv", default=None)
    h.add_argument("--fnn-csv", default=None)
    h.add_argument("--json", default=None, help="write the selection here instead of stdout")
    common(h)
    h.set_defaults(func=cmd_heuristics)

    f = sub.add_parser("forecast", help="rolling method-of-analogues forecast and MASE")
    f.add_argument("--input", required=True)
    f.add_argument("--m", type=positive_int, required=True)
    f.add_argument("--tau", type=positive_int, default=1)
    f.add_argument("--p", type=positive_int, default=1)
    forecast_flags(f)
    f.add_argument("--out", default=None, help="predictions and truth as CSV")
    f.add_argument("--json", default=None, help="write the summary here instead of stdout")
    common(f)
    f.set_defaults(func=cmd_forecast)

    z = sub.add_parser("horizon", help="SPI as a function of prediction horizon")
    z.add_argument("--input", required=True)
    z.add_argument("--p", type=int_range, required=True)
    z.add_argument("--m", type=int_range, required=True)
    z.add_argument("--tau", type=int_range, required=True)
    knn(z)
    z.add_argument("--out", required=True)
    common(z, threads=True)
    z.set_defaults(func=cmd_horizon)

    d = sub.add_parser("datalength", help="SPI as a function of trace length")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="use prefixes of this trace")
    src.add_argument("--system", choices=dynamics.SYSTEMS, help="generate a trace per length")
    d.add_argument("--k", type=positive_int, help="Lorenz 96 dimension K")
    d.add_argument("--f", type=float, help="Lorenz 96 forcing F")
    d.add_argument("--discard", type=int, default=dynamics.DISCARD)
    d.add_argument("--lengths", type=int_range, required=True)
    d.add_argument("--m", type=int_range, required=True)
    d.add_argument("--tau", type=positive_int, default=1)
    d.add_argument("--p", type=positive_int, default=1)
    knn(d)
    d.add_argument("--out", required=True)
    common(d, threads=True)
    d.set_defaults(func=cmd_datalength)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        args.func(args)
    except UsageError as exc:
        print(f"spiselect {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"spiselect {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SpiError, OSError, ValueError) as exc:
        print(f"spiselect {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run())
