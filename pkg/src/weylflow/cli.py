"""Command line front end for the verification suites.

Subcommands map one to one onto the study functions; each run prints a
pass/fail line per check, writes the metric rows as CSV under the output
directory, and exits 0 when every check passed, 1 on a failed check, and
2 on a configuration or runtime problem.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config, template_text
from .studies import (
    CALCULUS_SUBSUITES,
    run_calculus_suite,
    run_convergence_study,
    run_egorov_study,
    run_tdhf_checks,
    run_vlasov_checks,
)

__all__ = ["main", "build_parser"]

_RUN_COMMANDS = ("calculus", "converge", "egorov", "vlasov", "tdhf")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylflow",
        description=(
            "Run the verification suites: static calculus identities, "
            "mean-field convergence ladders, conjugation versus transport, "
            "and the standalone classical and quantum propagators."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    descriptions = {
        "calculus": "quantization, frame, smoothing, and bracket identities",
        "converge": "order-h convergence of the quantum evolution to mean-field transport",
        "egorov": "cascade structure and conjugation-versus-transport comparison",
        "vlasov": "classical transport solver checks (free streaming, mass, volume)",
        "tdhf": "self-consistent quantum propagation invariants",
    }
    for name in _RUN_COMMANDS:
        sp = sub.add_parser(name, help=descriptions[name])
        sp.add_argument("--config", type=Path, default=None,
                        help="experiment config file (defaults baked in when omitted)")
        sp.add_argument("--out", type=Path, default=None,
                        help="output directory (overrides the config's out_dir)")
        sp.add_argument("--h", dest="h_list", default=None,
                        help="comma separated ladder override, e.g. 0.4,0.2,0.1")
        if name == "calculus":
            sp.add_argument("--suite", default="all",
                            choices=("all",) + CALCULUS_SUBSUITES,
                            help="restrict to one calculus sub-suite")
        if name == "converge":
            sp.add_argument("--refine", action="store_true",
                            help="rerun the ladder at doubled resolution and gate the shift")

    tpl = sub.add_parser("emit-config-template",
                         help="print a commented config template")
    tpl.add_argument("--out", type=Path, default=None,
                     help="write the template to this file instead of stdout")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.h_list:
        try:
            ladder = tuple(float(tok) for tok in args.h_list.split(",") if tok.strip())
        except ValueError as exc:
            raise ConfigError(f"bad --h list {args.h_list!r}: {exc}") from None
        cfg = cfg.with_overrides(h_values=ladder)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "emit-config-template":
        text = template_text()
        if args.out is None:
            sys.stdout.write(text)
        else:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(text)
            print(f"wrote {args.out}")
        return 0

    try:
        cfg = _load(args)
        out_dir = Path(args.out) if args.out else Path(cfg.out_dir)
        if args.command == "calculus":
            table, checks = run_calculus_suite(cfg, suite=args.suite)
        elif args.command == "converge":
            table, checks = run_convergence_study(cfg, refine=args.refine)
        elif args.command == "egorov":
            table, checks = run_egorov_study(cfg)
        elif args.command == "vlasov":
            table, checks = run_vlasov_checks(cfg, raster_dir=out_dir)
        else:
            table, checks = run_tdhf_checks(cfg, raster_dir=out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2

    for check in checks:
        print(check.line())
    csv_path = table.write_csv(out_dir / f"{args.command}.csv")
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed; "
          f"rows written to {csv_path}")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
