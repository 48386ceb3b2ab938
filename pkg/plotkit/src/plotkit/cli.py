"""CLI: render one figure from a spec file."""

import argparse
import sys

from .figures import render
from .spec import parse_figure_spec
from .tsv import InputError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render a figure from simulator TSV outputs.")
    parser.add_argument("--spec", required=True, help="figure spec file")
    args = parser.parse_args(argv)
    try:
        spec = parse_figure_spec(args.spec)
        out = render(spec)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
