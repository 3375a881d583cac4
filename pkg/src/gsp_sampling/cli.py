"""Command line entry point: ``gsp-sampling <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import GspError
from .experiments import (
    CONFIG_FIELD_DOCS,
    ExperimentConfig,
    bundled_config,
    bundled_config_names,
    make_graph,
    run_mse_sweep,
    run_tau_sweep,
    verify_theorems,
    write_mse_outputs,
    write_tau_outputs,
)
from .graph import ShiftKind, shift_operator
from .spectral import eigendecompose, save_basis


def _epilog():
    lines = ["config fields (JSON object; unknown keys are rejected):"]
    width = max(len(k) for k in CONFIG_FIELD_DOCS)
    lines += [f"  {k:<{width}}  {v}" for k, v in CONFIG_FIELD_DOCS.items()]
    lines += [
        "",
        "--config takes a JSON file path or a bundled config name: "
        + ", ".join(bundled_config_names()),
        "Outputs start with '# key: value' metadata lines (CSV) or a 'metadata' object (JSON).",
        "GSL_THREADS sets the worker pool size (default: available CPUs).",
    ]
    return "\n".join(lines)


def _snr_list(values):
    if not values:
        return None
    out = []
    for v in values:
        out.extend(float(x) for x in v.split(",") if x)
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="default",
                        help="JSON config path or bundled config name (default: %(default)s)")
    common.add_argument("--seed", type=int, help="override config seed")
    common.add_argument("--out", help="override config output_dir")
    common.add_argument("--snr", action="append", metavar="SNR[,SNR...]",
                        help="override snr_list; repeatable or comma separated")
    common.add_argument("--n", type=int, help="override n_vertices")
    common.add_argument("--bandwidth", type=int, help="override bandwidth k")

    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="gsp-sampling",
        description="Graph signal sampling: expected LS error, SNR thresholds and sweeps.",
        epilog=_epilog(),
        formatter_class=fmt,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("mse-sweep", parents=[common], epilog=_epilog(), formatter_class=fmt,
                   help="analytic and empirical MSE against sample size (CSV + SVG)")
    sub.add_parser("tau-sweep", parents=[common], epilog=_epilog(), formatter_class=fmt,
                   help="SNR threshold tau along each scheme's selection order (CSV + SVG)")
    sub.add_parser("verify", parents=[common], epilog=_epilog(), formatter_class=fmt,
                   help="run the identity/theorem checks; nonzero exit on failure")
    gen = sub.add_parser("gen-graph", parents=[common], epilog=_epilog(), formatter_class=fmt,
                         help="write the config's graph instances as JSON")
    gen.add_argument("--cache-basis", action="store_true",
                     help="also write each instance's spectral basis as a binary cache")
    return parser


def load_config(args):
    overrides = dict(
        seed=args.seed, output_dir=args.out, snr_list=_snr_list(args.snr),
        n_vertices=args.n, bandwidth=args.bandwidth,
    )
    path = Path(args.config)
    if path.suffix == ".json" or path.exists():
        return ExperimentConfig.from_file(path, **overrides)
    if args.config not in bundled_config_names():
        raise GspError(f"config {args.config!r} is neither a file nor a bundled config")
    return ExperimentConfig.from_dict(bundled_config(args.config), **overrides)


def _gen_graph(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(cfg.n_graph_instances):
        g = make_graph(cfg, i)
        doc = g.to_json()
        doc["metadata"] = {**cfg.metadata(), "instance": i, "graph_hash": g.digest()}
        path = out / f"graph_{i}.json"
        path.write_text(json.dumps(doc))
        paths.append(path)
    return paths


def _cache_bases(cfg):
    out = Path(cfg.output_dir)
    kind = ShiftKind(cfg.shift_kind)
    for i in range(cfg.n_graph_instances):
        g = make_graph(cfg, i)
        basis = eigendecompose(shift_operator(g, kind), kind)
        save_basis(out / f"graph_{i}.{kind.value}.basis", basis, g.digest())


def run(args):
    cfg = load_config(args)
    if args.command == "mse-sweep":
        paths = write_mse_outputs(cfg, run_mse_sweep(cfg), cfg.output_dir)
    elif args.command == "tau-sweep":
        paths = write_tau_outputs(cfg, run_tau_sweep(cfg), cfg.output_dir)
    elif args.command == "gen-graph":
        paths = _gen_graph(cfg)
        if args.cache_basis:
            _cache_bases(cfg)
    else:
        report = verify_theorems(cfg)
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "verify_report.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        for name, res in report["checks"].items():
            status = "PASS" if res["passed"] else "FAIL"
            print(f"{status} {name}: count={res['count']} worst_residual={res['worst_residual']:.3g}")
        print(f"wrote {path}")
        return 0 if report["passed"] else 1
    for p in paths:
        print(f"wrote {p}")
    return 0


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return run(args)
    except (GspError, OSError) as exc:
        print(f"gsp-sampling: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
