"""Command-line entry point: ``oddindex <subcommand> [flags]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigurationError
from .harness import EXIT_CONFIG, SUITES, Scenario, emit_report, run_scenario

SUBCOMMANDS = {
    "clifford-check": ["clifford"],
    "index": ["index"],
    "specflow": ["specflow"],
    "eta": ["eta"],
    "lefschetz": ["lefschetz"],
    "verify-all": list(SUITES),
}

# flag destination -> Scenario field
FLAG_FIELDS = {
    "Lambda": "Lambda", "p": "p", "k": "k", "loop_file": "loop_file", "grid": "grid",
    "delta": "delta", "epsilon": "epsilons", "quad_order": "quad_order", "h_power": "h_power",
    "fixed_points": "fixed_points", "dims": "clifford_dims", "samples": "clifford_samples",
    "output": "output", "seed": "seed",
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("scenario")
    g.add_argument("--config", type=Path, help="JSON scenario file; flags override its values")
    g.add_argument("--Lambda", "--lambda", dest="Lambda", type=int, help="Fourier truncation order")
    g.add_argument("--p", type=int, help="order of the rotation group Z_p")
    g.add_argument("--k", type=int, help="degree of the scalar loop e^{ik theta} (when no loop file)")
    g.add_argument("--loop-file", help="JSON loop specification")
    g.add_argument("--grid", type=int, help="number of path samples")
    g.add_argument("--delta", type=float, help="override the spectral level -delta")
    g.add_argument("--epsilon", type=float, action="append", help="heat cut-off (repeatable)")
    g.add_argument("--quad-order", type=int, help="initial Gauss-Legendre order for the heat integral")
    g.add_argument("--h-power", type=int, help="restrict eta checks to this group element")
    g.add_argument("--fixed-points", help="JSON fixed-point data for the lefschetz suite")
    g.add_argument("--dims", type=int, nargs="+", help="odd Clifford dimensions to check")
    g.add_argument("--samples", type=int, help="random elements per Clifford dimension")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("-o", "--output", help="write the JSON report here")
    g.add_argument("-q", "--quiet", action="store_true", help="do not print the table")
    g.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oddindex", description="Equivariant Toeplitz index verification")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    helps = {
        "clifford-check": "trace formula on random Clifford elements",
        "index": "Toeplitz index against the winding number",
        "specflow": "equivariant spectral flow of the Dirac and sign paths",
        "eta": "heat-integral index and eta variation",
        "lefschetz": "fixed-point contributions and circle calibration",
        "verify-all": "every suite",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def scenario_from_args(args: argparse.Namespace) -> Scenario:
    data: dict = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a JSON object")
    for dest, fld in FLAG_FIELDS.items():
        val = getattr(args, dest)
        if val is not None:
            data[fld] = val
    if args.command != "verify-all" or "checks" not in data:
        data["checks"] = SUBCOMMANDS[args.command]
    try:
        return Scenario.from_dict(data)
    except TypeError as exc:
        raise ConfigurationError(f"bad scenario: {exc}") from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        scenario = scenario_from_args(args)
        report = run_scenario(scenario)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        emit_report(report, scenario.output, None if args.quiet else sys.stdout)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
