"""Command line front end: ``hybridber sweep | optimize | validate``.

Exit codes: 0 success, 2 scenario/validation error, 3 numerical
non-convergence, 4 oracle mismatch (validate only).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from .config import ConfigError, load_scenario, with_overrides
from .em import QuadratureError
from .molecular import DegenerateVarianceError
from .optimize import IterationCapError, ber_profile, optimize_split, search_bracket
from .sweep import VARIABLES, SweepSpec, format_value, rows_to_csv, run_sweep
from .validation import report_csv, validate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_MISMATCH = 4


def _parse_override(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), yaml.safe_load(value)


def _scenario(args):
    sc = load_scenario(args.config)
    if args.override:
        sc = with_overrides(sc, dict(args.override))
    return sc


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    spec = SweepSpec(args.variable, args.start, args.stop, args.points)
    _write(args.out, rows_to_csv(VARIABLES[spec.variable], run_sweep(sc, spec)))
    return EXIT_OK


def optimize_outputs(sc, epsilon: float, points: int) -> tuple[str, dict]:
    """Profile CSV text and summary record for one optimisation run."""
    res = optimize_split(sc, epsilon)
    lo, hi = search_bracket(sc)
    rows = [(t * 1e3, ber_profile(float(t), sc)) for t in np.linspace(lo, hi, points)]
    summary = {
        "scenario": sc.name,
        "t_dmc_opt_ms": float(format_value(res.t_dmc_opt * 1e3)),
        "p_e2e_opt": float(format_value(res.p_e2e_opt)),
        "iterations": res.iterations,
        "epsilon": res.epsilon,
        "converged": res.converged,
        "flat": res.flat,
    }
    return rows_to_csv("t_dmc_ms", rows), summary


def cmd_optimize(args) -> int:
    sc = _scenario(args)
    text, summary = optimize_outputs(sc, args.epsilon, args.points)
    _write(args.out, text)
    line = json.dumps(summary, sort_keys=True)
    if args.summary:
        _write(args.summary, line + "\n")
    print(line)
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = _scenario(args)
    points = validate(sc, args.particles, args.bits, args.seed, workers=args.workers)
    _write(args.out, report_csv(points))
    for c in points:
        print(f"{c.name:10s} analytic={format_value(c.analytic)} empirical={format_value(c.empirical)} "
              f"tol={format_value(c.tolerance)} {'pass' if c.passed else 'FAIL'}")
    return EXIT_OK if all(c.passed for c in points) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridber", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="scenario file or preset name")
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--override", action="append", type=_parse_override, default=[],
                        metavar="KEY=VALUE", help="e.g. molecular.relay_pos_um=[100,54,10]")

    sp = sub.add_parser("sweep", help="BER of every link along one swept parameter")
    common(sp)
    sp.add_argument("--variable", required=True, choices=sorted(VARIABLES))
    sp.add_argument("--start", type=float, required=True)
    sp.add_argument("--stop", type=float, required=True)
    sp.add_argument("--points", type=int, default=51)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("optimize", help="best molecular/EM slot split")
    common(sp)
    sp.add_argument("--epsilon", type=float, default=1e-4)
    sp.add_argument("--points", type=int, default=201, help="profile grid size")
    sp.add_argument("--summary", help="also write the JSON summary here")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("validate", help="analytic model vs Brownian particle oracle")
    common(sp)
    sp.add_argument("--particles", type=int, default=10 ** 6)
    sp.add_argument("--bits", type=int, default=10 ** 5)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DegenerateVarianceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, IterationCapError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
