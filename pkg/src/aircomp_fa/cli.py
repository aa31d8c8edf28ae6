"""Command-line interface: solve one scenario, run a sweep, or self-validate.

Exit codes: 0 success, 1 usage error, 2 config/feasibility/parse error,
3 numerical failure (including failed validation checks). Diagnostics go to
stderr; results go to the output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .experiments import SweepSpec, run_sweep, write_results
from .model import ConfigError, ContractError, FeasibilityError, SystemConfig, build_channels
from .objective import mse_analytic
from .solvers import BcdSettings, NumericalError, bcd_solve
from .validate import run_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _complex_list(vec: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in vec]


def _cmd_solve(args) -> int:
    with open(args.config) as handle:
        config = SystemConfig.from_json(handle.read())
    settings = BcdSettings(outer_tolerance=args.tol, max_outer_iters=args.max_iters)
    sol, trace = bcd_solve(config, settings, rng_seed=args.seed)
    breakdown = mse_analytic(config, build_channels(config, sol.positions), sol)
    payload = {
        "solution": {
            "transmit_coeffs": _complex_list(sol.transmit_coeffs),
            "beamformer": _complex_list(sol.beamformer),
            "positions": sol.positions.values.tolist(),
        },
        "mse": breakdown.to_dict(),
        "trace": trace.to_dict(),
    }
    with open(args.out, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    if args.verbose:
        print(
            f"solved in {trace.num_iterations} iterations, total MSE {breakdown.total:.6e}",
            file=sys.stderr,
        )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    with open(args.spec) as handle:
        spec = SweepSpec.from_json(handle.read())
    overrides = {}
    if args.geometries is not None:
        overrides["num_geometries"] = args.geometries
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if overrides:
        spec = replace(spec, **overrides)
    results = run_sweep(spec, BcdSettings(), jobs=args.jobs)
    write_results(results, args.out)
    if args.verbose:
        print(f"wrote {len(results)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    checks = run_all(args.seed)
    failed = 0
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}", file=sys.stderr)
        failed += 0 if check.passed else 1
    if failed:
        print(f"{failed}/{len(checks)} checks failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aircomp-fa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run BCD on one scenario config")
    p_solve.add_argument("--config", required=True, help="SystemConfig JSON path")
    p_solve.add_argument("--out", required=True, help="output JSON path")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--tol", type=float, default=1e-4, help="outer convergence tolerance")
    p_solve.add_argument("--max-iters", type=int, default=100)
    p_solve.add_argument("--verbose", action="store_true")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run an experiment sweep to CSV")
    p_sweep.add_argument("--spec", required=True, help="SweepSpec JSON path")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--geometries", type=int, default=None, help="override num_geometries")
    p_sweep.add_argument("--seed", type=int, default=None, help="override rng_seed")
    p_sweep.add_argument("--jobs", type=int, default=None, help="worker processes")
    p_sweep.add_argument("--verbose", action="store_true")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_val = sub.add_parser("validate", help="run the numerical oracle suite")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--verbose", action="store_true")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FeasibilityError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
