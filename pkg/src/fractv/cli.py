"""Command-line interface: ``fractv {synth,graph,denoise,grid}``.

Exit codes: 0 success, 2 configuration error, 3 input parse error,
4 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import InvalidInputError, InvalidParameterError, ParseError, UnsupportedOperatorError
from .graph import build_knn_graph
from .pipeline import ExperimentConfig, grid_search, run_experiment
from .synth import synthesize

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("fractv")


class ConfigError(Exception):
    pass


def order_grid(a_min, a_max, b_min, b_max, step):
    """Closed grid over both ranges; both endpoints are always included."""
    if not 0 < step <= 1:
        raise ConfigError(f"grid step must lie in (0, 1], got {step}")
    for lo, hi in ((a_min, a_max), (b_min, b_max)):
        if not 0 <= lo <= hi <= 1:
            raise ConfigError(f"order range [{lo}, {hi}] must lie within [0, 1]")

    def axis(lo, hi):
        n = int(np.floor((hi - lo) / step + 1e-9))
        vals = [round(lo + i * step, 10) for i in range(n + 1)]
        if vals[-1] < hi - 1e-9:
            vals.append(hi)
        return vals

    return [(a, b) for a in axis(a_min, a_max) for b in axis(b_min, b_max)]


def _config_from_args(args, grid_required=False) -> ExperimentConfig:
    cfg = io.load_config(args.config) if args.config else ExperimentConfig()
    overrides = {"P": args.p, "Q": args.q, "group_length": args.group_len, "first_stage": args.first_stage,
                 "snr_convention": args.snr_convention, "seed": args.seed, "trials": args.trials,
                 "input_snr_db": args.input_snr, "gamma": args.gamma}
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    if args.grid_step is not None:
        cfg.orders_grid = order_grid(args.a_min, args.a_max, args.b_min, args.b_max, args.grid_step)
    elif args.a is not None or args.b is not None:
        cfg.orders_grid = [(args.a if args.a is not None else 1.0, args.b if args.b is not None else 1.0)]
    elif grid_required and not args.config:
        cfg.orders_grid = order_grid(args.a_min, args.a_max, args.b_min, args.b_max, 0.1)
    cfg.__post_init__()
    return cfg


def cmd_synth(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    coords, g, X = synthesize(args.n, args.t, args.smoothness, args.seed, k=args.k)
    io.write_coordinates(out / "coords.csv", coords)
    io.write_signal(out / "signal.csv", X)
    io.write_edge_list(out / "edges.csv", g)
    inputs = {}
    if args.noisy_snr is not None:
        from .pipeline import add_noise
        io.write_signal(out / "noisy.csv", add_noise(X, args.noisy_snr, seed=[args.seed, 1]))
    config = {"n": args.n, "t": args.t, "smoothness": args.smoothness, "k": args.k, "noisy_snr": args.noisy_snr}
    io.RunManifest.create(sys.argv, config, inputs, args.seed).write(out / "manifest.json")
    log.info("wrote synthetic data to %s", out)
    return EXIT_OK


def cmd_graph(args) -> int:
    out = Path(args.out_dir)
    coords = io.load_coordinates(args.coords)
    g = build_knn_graph(coords, args.k, metric=args.metric, weighting=args.weighting)
    out.mkdir(parents=True, exist_ok=True)
    io.write_edge_list(out / "edges.csv", g)
    config = {"k": args.k, "metric": args.metric, "weighting": args.weighting}
    io.RunManifest.create(sys.argv, config, {"coords": args.coords}).write(out / "manifest.json")
    return EXIT_OK


def _run(args, grid_required: bool) -> int:
    if args.signal is None and args.clean is None:
        raise ConfigError("need --signal (noisy data) and/or --clean")
    cfg = _config_from_args(args, grid_required)
    if args.clean is not None and args.signal is None:
        cfg.mode = "experiment"
    elif args.clean is None:
        cfg.mode = "blind"
    elif args.mode:
        cfg.mode = args.mode
    coords = io.load_coordinates(args.coords)
    Y = io.load_signal(args.signal).values if args.signal else None
    X = io.load_signal(args.clean).values if args.clean else None
    ref = Y if Y is not None else X
    if coords.shape[0] != ref.shape[0]:
        raise ConfigError(f"{coords.shape[0]} coordinates but signal has {ref.shape[0]} vertices")
    if Y is not None and X is not None and X.shape != Y.shape:
        raise ConfigError(f"clean signal shape {X.shape} differs from noisy {Y.shape}")
    cfg.validate(*ref.shape)

    g = build_knn_graph(coords, min(cfg.k, coords.shape[0] - 1), metric=cfg.metric, weighting=cfg.weighting)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if Y is None:
        report = run_experiment(X, g, cfg)
    else:
        report = grid_search(Y, g, cfg, X_clean=X)
        io.write_signal(out / "denoised.csv", report.estimate)
        io.write_signal(out / "first_stage.csv", report.first_stage_estimate)
    io.write_report(out / "report.json", report)
    io.write_surface(out / "surface.csv", report)
    inputs = {"signal": args.signal, "clean": args.clean, "coords": args.coords, "config": args.config}
    io.RunManifest.create(sys.argv, cfg.to_dict(), inputs, cfg.seed).write(out / "manifest.json")
    a, b = report.best_orders
    if report.ranking == "snr":
        log.info("best orders (a=%g, b=%g): input %.3f dB, first stage %.3f dB, second stage %.3f dB",
                 a, b, report.input_snr_db, report.first_stage_snr_db, report.second_stage_snr_db)
    else:
        log.info("best orders (a=%g, b=%g): residual %.6g", a, b, report.surface_value((a, b)))
    return EXIT_OK


def cmd_denoise(args) -> int:
    return _run(args, grid_required=False)


def cmd_grid(args) -> int:
    return _run(args, grid_required=True)


def _add_run_args(p, default_step=None):
    p.add_argument("--signal", help="noisy N x T signal CSV")
    p.add_argument("--clean", help="clean N x T signal CSV (experiment mode)")
    p.add_argument("--coords", required=True, help="coordinates CSV (id,lat,lon)")
    p.add_argument("--config", help="JSON config mirroring ExperimentConfig")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--a", type=float, help="temporal fractional order")
    p.add_argument("--b", type=float, help="graph fractional order")
    p.add_argument("--grid-step", type=float, default=default_step)
    p.add_argument("--a-min", type=float, default=0.0)
    p.add_argument("--a-max", type=float, default=1.0)
    p.add_argument("--b-min", type=float, default=0.0)
    p.add_argument("--b-max", type=float, default=1.0)
    p.add_argument("--p", type=int, help="temporal polynomial degree P")
    p.add_argument("--q", type=int, help="graph polynomial degree Q")
    p.add_argument("--group-len", type=int, help="segment length M")
    p.add_argument("--first-stage", choices=["tikhonov", "median"])
    p.add_argument("--snr-convention", choices=["paper", "conventional"])
    p.add_argument("--mode", choices=["experiment", "blind"])
    p.add_argument("--trials", type=int)
    p.add_argument("--input-snr", type=float, help="target input SNR (dB) for noise injection")
    p.add_argument("--gamma", type=float, help="Tikhonov weight (default: tuned or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write synthetic coordinates and a smooth signal")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--t", type=int, default=120)
    p.add_argument("--smoothness", type=int, default=20)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noisy-snr", type=float, help="also write noisy.csv at this SNR (dB)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("graph", help="build and export the k-NN graph")
    p.add_argument("--coords", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--metric", choices=["haversine", "euclidean"], default="haversine")
    p.add_argument("--weighting", choices=["gaussian", "binary"], default="gaussian")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("denoise", help="two-stage denoising (grid search when a grid is configured)")
    _add_run_args(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("grid", help="output SNR surface over fractional orders")
    _add_run_args(p)
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidInputError, UnsupportedOperatorError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
