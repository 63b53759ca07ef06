"""plotkit command line: `plotkit <kind> --in data.csv --out fig.png
[--oracle exact.csv] [--contours 40] [--inset x0:x1]`.

Exit codes: 0 on success, 2 on a bad request (unknown kind, schema mismatch,
empty input).
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, RenderError, render


def build_parser():
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="Render solver CSVs to figures")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV (repeatable for overlaid line/history plots)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--oracle", default=None,
                        help="exact-solution CSV overlay (line1d only)")
    parser.add_argument("--contours", type=int, default=40)
    parser.add_argument("--inset", default=None,
                        help="zoomed inset range x0:x1 (line1d only)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv if argv is None else argv[1:])
    inset = None
    if args.inset is not None:
        try:
            lo, hi = (float(tok) for tok in args.inset.split(":"))
        except ValueError:
            print(f"bad inset range {args.inset!r} (expected x0:x1)", file=sys.stderr)
            return 2
        inset = (lo, hi)
    try:
        info = render(args.kind, args.inputs, args.out, oracle=args.oracle,
                      contours=args.contours, inset=inset)
    except RenderError as exc:
        print(f"plotkit error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {info['out']}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
