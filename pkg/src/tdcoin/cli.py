"""Command-line front end.

Subcommands::

    run        one walk (or a preset)
    sweep      one walk per phase in a comma-separated --phi0 list
    continuum  continuum slices for each --w
    compare    two engines side by side (--engine vs --against)

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 numerical-accuracy error.
"""

from __future__ import annotations

import argparse
import sys

from .config import PRESETS, UsageError, build_config, merge_settings, read_config_file
from .errors import AccuracyError, AiryRangeError, DomainError, ExtentError, WalkError
from .experiments import run_experiment
from .output import to_json, write_output

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3

PHI0_HELP = ("coin phase: 'a/b' means 2*pi*a/b (kept exact), 'golden' means "
             "2*pi*(sqrt5-1)/2, a bare real is radians")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    # every default is None so we can tell which flags were given explicitly
    add("--config", help="key=value file with the same keys as the flags")
    add("--preset", choices=PRESETS)
    add("--engine", help="standard, timedep, gqw, gqw2, control or decoupled")
    add("--against", help="second engine for compare")
    add("--rho", help="coin bias in [0, 1]")
    add("--phi0", help=PHI0_HELP)
    add("--steps")
    add("--stride")
    add("--initial", help="u_re,u_im,d_re,d_im of the coin state at n=0")
    add("--lattice", help="'line' or 'circle:L' (2L+1 sites)")
    add("--snapshots", help="comma-separated times for distribution snapshots")
    add("--w", help="Gaussian width(s) for continuum runs, comma-separated")
    add("--spacing", help="continuum grid spacing")
    add("--halfwidth", help="continuum grid half-width")
    add("--taus", help="comma-separated continuum times")
    add("--workers", help="parallel jobs for preset sweeps")
    add("--out", help="output directory (omit to print the summary only)")
    add("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tdcoin", description="Quantum walks with time-dependent coins.",
                     epilog=PHI0_HELP)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, text in (("run", "single walk or preset"),
                       ("sweep", "one walk per phase in a comma-separated --phi0"),
                       ("continuum", "continuum slices for each --w"),
                       ("compare", "two engines side by side")):
        _common(sub.add_parser(name, help=text, description=text, epilog=PHI0_HELP))
    return parser


def parse_config(argv):
    """``(config, phase list)`` from command-line arguments."""
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("missing subcommand (run, sweep, continuum or compare)")
    flags = {k: v for k, v in vars(args).items()
             if v is not None and k not in ("command", "config")}
    file_values = read_config_file(args.config) if args.config else None
    settings = merge_settings(None, file_values, flags)
    phases = None
    if args.command == "sweep" and "," in settings.get("phi0", ""):
        phases = tuple(p.strip() for p in settings["phi0"].split(",") if p.strip())
        settings["phi0"] = phases[0]
    return build_config(args.command, settings), phases


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, phases = parse_config(argv)
    except UsageError as exc:
        print(f"tdcoin: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tdcoin: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        records = run_experiment(cfg, phases)
    except (AccuracyError, AiryRangeError, DomainError, ArithmeticError) as exc:
        print(f"error,numerical,{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ExtentError, WalkError) as exc:
        print(f"error,usage,{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        for record in records:
            if cfg.out is not None:
                write_output(record, cfg.out, cfg.format)
            print(f"{record.name} {to_json(record.summary)}")
            print(f"{record.name} wall_time={record.wall_time:.3f}s", file=sys.stderr)
    except OSError as exc:
        print(f"error,io,{exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
