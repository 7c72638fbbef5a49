"""Command-line entry points: run, surface, transform, distance."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ScdtError
from .harness import ExperimentConfig, emit_surfaces, run_experiment
from .metric import signed_distance, transform_distance
from .signal import read_signal_csv
from .transform import METHODS, scdt, uniform_reference


def _add_reference(p: argparse.ArgumentParser):
    p.add_argument("--reference", choices=["uniform"], default="uniform")
    p.add_argument("--ref-min", type=float, default=0.0)
    p.add_argument("--ref-max", type=float, default=1.0)
    p.add_argument("--ref-n", type=int, default=None,
                   help="reference samples (default: the signal's sample count)")
    p.add_argument("--method", choices=METHODS, default="spline")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scdt", description="Signed CDT transforms and warp estimation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configured experiment and write its report")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="override the config's output_dir")

    p = sub.add_parser("surface", help="write SCDT and WBAF cost surfaces for a config")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="override the config's output_dir")

    p = sub.add_parser("transform", help="signed CDT of a signal CSV")
    p.add_argument("signal")
    _add_reference(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("distance", help="signed distance between two signal CSVs")
    p.add_argument("a")
    p.add_argument("b")
    _add_reference(p)
    return ap


def _load(path: str, out: str | None) -> ExperimentConfig:
    cfg = ExperimentConfig.load(path)
    if out is not None:
        from pathlib import Path

        cfg.output_dir = Path(out)
    return cfg


def _cmd_run(args) -> dict:
    cfg = _load(args.config, args.out)
    report = run_experiment(cfg)
    return report.to_dict()


def _cmd_surface(args) -> dict:
    return emit_surfaces(_load(args.config, args.out))


def _cmd_transform(args) -> dict:
    s = read_signal_csv(args.signal)
    s0 = uniform_reference(args.ref_min, args.ref_max, args.ref_n or s.grid.n)
    x = scdt(s, s0, args.method, reference_kind=args.reference)
    x.save(args.out)
    return {"out": args.out, "pos_mass": x.pos_mass, "neg_mass": x.neg_mass}


def _cmd_distance(args) -> dict:
    a, b = read_signal_csv(args.a), read_signal_csv(args.b)
    s0 = uniform_reference(args.ref_min, args.ref_max, args.ref_n or max(a.grid.n, b.grid.n))
    xa, xb = scdt(a, s0, args.method), scdt(b, s0, args.method)
    return {"signed_distance": signed_distance(a, b, s0, args.method),
            "transform_distance": transform_distance(xa, xb, s0)}


COMMANDS = {"run": _cmd_run, "surface": _cmd_surface,
            "transform": _cmd_transform, "distance": _cmd_distance}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except (ScdtError, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        sys.stderr.write(json.dumps(err) + "\n")
        return 2
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
