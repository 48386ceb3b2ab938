"""Command-line interface.

Subcommands: grid-run, ci-run, export-electronic-data, spectrum, fit-cutoff,
sweep. Exit codes: 0 success, 2 configuration/data error, 3 numerical failure.
"""

import argparse
import sys

import numpy as np

from .config import parse_config, schema_documentation
from .errors import ConfigError, ConvergenceError, DataFormatError, PropagationError
from .runner import export_electronic_data, run_basis, run_fit, run_grid, \
    run_spectrum, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavhhg",
        description="Driven-atom/molecule dynamics in a quantized cavity with HHG analysis.",
        epilog="Config keys (unit in brackets):\n" + schema_documentation(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
        p.add_argument("--threads", type=int, default=1, help="parallel runs in sweeps")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (noise tests only; runs are deterministic)")
        return p

    add("grid-run", "propagate the 1D atom + cavity wavepacket on the grid")
    add("ci-run", "propagate in the polaritonic basis from an electronic data file")
    p = add("export-electronic-data", "solve the 1D atom and write an electronic data file")
    p.add_argument("--n-states", type=int, default=30, help="number of states to export")
    p.add_argument("--data-out", default="electronic.dat", help="output data file")
    add("spectrum", "windowed HHG spectrum from a stored trajectory")
    add("fit-cutoff", "three-segment cutoff fit of a stored spectrum")
    add("sweep", "expand sweep.* axes and run each point")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None:
        np.random.seed(args.seed)
    try:
        cfg = parse_config(args.config)
        out = args.out or cfg.get("output.dir", "out")
        if args.command == "grid-run":
            summary = run_grid(cfg, out)
            print(f"grid run done: omega_cut = {summary['omega_cut']:.6g}, "
                  f"final norm = {summary['final_norm']:.6g} -> {out}")
        elif args.command == "ci-run":
            summary = run_basis(cfg, out)
            print(f"basis run done: omega_cut = {summary['omega_cut']:.6g}, "
                  f"final norm = {summary['final_norm']:.6g} -> {out}")
        elif args.command == "export-electronic-data":
            data = export_electronic_data(
                cfg, args.data_out, args.n_states,
                escape_length=cfg.get("ionization.escape_length"))
            print(f"exported {data.n_states} states to {args.data_out}")
        elif args.command == "spectrum":
            result = run_spectrum(cfg, out)
            print(f"spectrum written to {result['out']}")
        elif args.command == "fit-cutoff":
            result = run_fit(cfg, out)
            flag = " (degenerate)" if result["degenerate"] else ""
            print(f"omega_cut = {result['omega_cut']:.6g}{flag} -> {result['out']}")
        elif args.command == "sweep":
            manifest, _ = run_sweep(cfg, out, threads=args.threads)
            failed = [tag for tag, status, _ in manifest if status != "ok"]
            print(f"sweep finished: {len(manifest) - len(failed)} ok, "
                  f"{len(failed)} failed -> {out}")
            if failed:
                return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, DataFormatError) as exc:
        if isinstance(exc, ConfigError):
            for problem in exc.problems:
                print(f"config error: {problem}", file=sys.stderr)
        else:
            print(f"data error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, PropagationError, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
