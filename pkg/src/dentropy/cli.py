"""Command-line entry point.

Usage: dentropy {fig1,fig23,fig4,spacing,check} CONFIG [--full-scale]

Exit codes: 0 success, 1 config validation failure, 2 numerical failure,
3 acceptance-check failure in `check`.
"""

import argparse
import sys

from . import runner
from .config import load_config
from .errors import ConfigError, EigenConvergenceError

_SWEEPS = {
    "fig1": runner.run_fig1_sweep,
    "fig23": runner.run_fig23_sweep,
    "fig4": runner.run_fig4_sweep,
    "spacing": runner.run_spacing_diag,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dentropy",
        description="Quench-relaxation sweeps: equilibration gap, IPR, "
        "and level-spacing diagnostics as CSV datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("fig1", "gap and fluctuations over the (lambda0, n0) grid"),
        ("fig23", "fig1 grid plus the universal-curve column f(xi)"),
        ("fig4", "IPR versus quench amplitude"),
        ("spacing", "Brody / KS level-spacing diagnostics"),
        ("check", "truncation check and runtime invariant suite"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="path to the experiment config (INI)")
        cmd.add_argument(
            "--full-scale",
            action="store_true",
            help="override a Dicke model to j = 20, n_max = 250",
        )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.full_scale:
        cfg = cfg.with_full_scale()
    try:
        if args.command == "check":
            return 0 if runner.run_check(cfg) else 3
        path = _SWEEPS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EigenConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # degenerate spectra, unfolding failures, contract violations
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
