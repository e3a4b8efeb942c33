"""Command-line entry point.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import balancing, spectrum
from .kernels import DomainError
from .params import TWO_PI, ConfigError, load_config, preset_fig2, preset_fig3
from .quadrature import assemble_covariance, psd
from .schemes import LossyConfigError, SchemeId, balanced_expr, balanced_expr_lossy

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64

FIG2_SCHEMES = [SchemeId.SingleVacuum, SchemeId.HybridIdeal, SchemeId.DualLossy]
FIG3_SCHEMES = [SchemeId.DualLossy, SchemeId.DualLossyPivot]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--config", type=Path, help="key = value parameter file")
    p.add_argument("--out", type=Path, help="output CSV path")
    p.add_argument("--schemes", help="comma-separated scheme names")
    p.add_argument("--samples", type=int, default=0, help="Monte-Carlo samples for the oracle cross-check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight", type=float, help="override the combination weight (unbalanced what-if)")
    p.add_argument("--unbalanced-theta-b", type=float, dest="theta_b",
                   help="use this cavity-B optical power [s^-3] instead of the balanced one")
    p.add_argument("--freq-hz", type=float, default=spectrum.REPORT_FREQ_HZ,
                   help="evaluation frequency for verify-balance / suppression-report")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG rendered next to the CSV")
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = _Parser(prog="nrpnoise", description="Quantum-noise budget of the dual-cavity detector.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, help_ in [
        ("fig2", "SQL-limited, hybrid and double-cavity spectra on the fig2 preset"),
        ("fig3", "double cavity with and without pivot motion on the fig3 preset"),
        ("sweep", "sweep arbitrary schemes over the configured grid"),
        ("verify-balance", "compare analytic and numerically optimized weight / power ratio"),
        ("suppression-report", "shot, back-action, thermal and signal factors of the balanced readout"),
    ]:
        _common(sub.add_parser(name, help=help_))
    return parser


def _parse_schemes(text, default):
    if not text:
        return list(default)
    try:
        return [SchemeId.parse(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args, preset):
    return load_config(args.config) if args.config else preset()


def _run_sweep(args, config, scheme_list, default_out, title):
    spectra = spectrum.sweep(config, scheme_list, args.weight, args.theta_b, args.workers)
    out = args.out or Path(default_out)
    spectrum.export_csv(spectra, out)
    print(f"wrote {out} ({len(spectra[0].freqs_hz)} points, schemes: {', '.join(s.scheme.value for s in spectra)})")
    if not args.no_plot:
        from .plotting import plot_spectra

        png = plot_spectra(spectra, out.with_suffix(".png"), title)
        print(f"wrote {png}")
    for s in spectra:
        below = s.freqs_hz[s.below_sql()]
        band = f"{below.min():.4g}-{below.max():.4g} Hz" if below.size else "none"
        print(f"{s.scheme.value}: min {s.psd_db.min():.3f} dB, below SQL: {band}")


def _verify_balance(args):
    config = _config(args, preset_fig2)
    omega = TWO_PI * args.freq_hz
    report = balancing.verify_balance(config, omega)
    for line in report.lines():
        print(line)
    if args.samples > 0:
        build = balanced_expr if config.losses.is_lossless else balanced_expr_lossy
        expr = build(omega, config)
        cov = assemble_covariance(config, omega)
        analytic = psd(expr, cov)
        mc = spectrum.monte_carlo_psd(expr, cov, args.samples, args.seed)
        print(f"psd_analytic = {analytic!r}")
        print(f"psd_monte_carlo = {mc.mean!r} +/- {mc.stderr!r} (n={mc.n_samples}, seed={mc.seed})")


def _suppression(args):
    config = _config(args, preset_fig2)
    modes = [False] if config.losses.is_lossless else [False, True]
    for lossy in modes:
        print(f"[{'lossy' if lossy else 'lossless'}]")
        for line in spectrum.suppression_report(config, lossy, args.freq_hz).lines():
            print(line)


def run(args):
    if args.command == "fig2":
        config = _config(args, preset_fig2)
        _run_sweep(args, config, _parse_schemes(args.schemes, FIG2_SCHEMES),
                   "fig2.csv", f"quantum noise, r = {config.r:g}")
    elif args.command == "fig3":
        _run_sweep(args, _config(args, preset_fig3), _parse_schemes(args.schemes, FIG3_SCHEMES),
                   "fig3.csv", "effect of pivot motion")
    elif args.command == "sweep":
        _run_sweep(args, _config(args, preset_fig2), _parse_schemes(args.schemes, list(SchemeId)),
                   "sweep.csv", None)
    elif args.command == "verify-balance":
        _verify_balance(args)
    elif args.command == "suppression-report":
        _suppression(args)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (ConfigError, LossyConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ArithmeticError, balancing.BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
