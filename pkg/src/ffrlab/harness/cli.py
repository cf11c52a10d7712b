"""Command-line entry point: run verification suites and write reports.

Usage:
    ffr <suite> [--d D] [--q-list a,b,c] [--j J] [--p P --r R]
                [--samples N] [--seed S] [--budget B] [--out PATH]
                [--format json|csv] [--config FILE] [--workers W]
    ffr all ...       run every suite (per-suite report files)
    ffr list          print the suites and the claims they certify

Precedence: command-line flags override the --config file, which overrides
the suite defaults.  Exit status is 0 when every executed assertion passed,
1 when any failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from ffrlab.harness.config import ExperimentConfig, suite_config
from ffrlab.harness.suites import CLAIMS, SUITES, run_suite


def _q_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad q list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffr",
        description="Verification suites for restriction/extension "
                    "inequalities on finite-field grids.",
    )
    parser.add_argument("suite",
                        help=f"one of {', '.join(SUITES)}; or 'all' / 'list'")
    parser.add_argument("--d", type=int, help="ambient dimension")
    parser.add_argument("--q-list", type=_q_list, dest="q_list",
                        help="comma-separated field orders, e.g. 3,7,11")
    parser.add_argument("--j", type=int, help="sphere radius")
    parser.add_argument("--p", type=float, help="input Lebesgue exponent")
    parser.add_argument("--r", type=float, help="output Lebesgue exponent")
    parser.add_argument("--samples", type=int,
                        help="random draws per size regime")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--budget", type=int,
                        help="largest admissible q**d; bigger cases skip")
    parser.add_argument("--out", help="report path (suite name is inserted "
                                      "when running 'all')")
    parser.add_argument("--format", choices=["json", "csv"], dest="fmt",
                        help="report format (default json)")
    parser.add_argument("--config",
                        help="JSON file with ExperimentConfig fields")
    parser.add_argument("--workers", type=int,
                        help="process fan-out across q values")
    return parser


def _collect_overrides(args: argparse.Namespace,
                       parser: argparse.ArgumentParser) -> dict:
    overrides: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        known = {f.name for f in dataclasses.fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            parser.error(f"unknown config keys in {args.config}: {sorted(unknown)}")
        overrides.update(data)
    if args.d is not None:
        overrides["d_list"] = [args.d]
    if args.q_list is not None:
        overrides["q_list"] = args.q_list
    if args.j is not None:
        overrides["j_list"] = [args.j]
    if (args.p is None) != (args.r is None):
        parser.error("--p and --r must be given together")
    if args.p is not None:
        overrides["pairs"] = [(args.p, args.r)]
    for key in ("samples", "seed", "budget", "out", "fmt", "workers"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return overrides


def _suite_out_path(base: str | None, suite: str, many: bool) -> str | None:
    if base is None or not many:
        return base
    stem, ext = os.path.splitext(base)
    return f"{stem}-{suite}{ext or '.json'}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.suite == "list":
        for name in SUITES:
            print(f"{name:18s} {CLAIMS[name]}")
        return 0
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        print(f"ffr: unknown suite {args.suite!r}; run 'ffr list'",
              file=sys.stderr)
        return 2
    try:
        overrides = _collect_overrides(args, parser)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"ffr: cannot read config: {exc}", file=sys.stderr)
        return 2
    base_out = overrides.pop("out", None)
    all_ok = True
    for name in names:
        out_path = _suite_out_path(base_out, name, many=len(names) > 1)
        try:
            config = suite_config(name, out=out_path, **overrides)
        except ValueError as exc:
            print(f"ffr: {exc}", file=sys.stderr)
            return 2
        report = run_suite(name, config)
        ok, bad, info = report.counts()
        status = "PASS" if report.passed else "FAIL"
        tail = f" -> {out_path}" if out_path else ""
        print(f"[{status}] {name}: {ok} passed, {bad} failed, "
              f"{info} informational ({report.seconds:.1f}s){tail}")
        all_ok = all_ok and report.passed
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
