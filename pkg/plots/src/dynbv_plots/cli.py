"""Command line: dynbv-plots <kind> --in FILE[,FILE] --out FILE."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynbv-plots",
        description="Render figures from dynbv experiment CSVs",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument(
        "--in",
        dest="inputs",
        required=True,
        help="input CSV path(s), comma separated; for analytic_vs_mc the "
        "first file is the analytic sweep, the rest are Monte-Carlo drift "
        "files; fixed_target optionally takes the runs CSV second for ERT",
    )
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(Path(p.strip()) for p in args.inputs.split(",") if p.strip()),
        output=Path(args.out),
        title=args.title,
    )
    try:
        written = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
