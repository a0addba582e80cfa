"""Command line entry point: ``phiconv <task> --problem FILE [options]``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import PhiConvexError
from .gallery import NAMES, gallery
from .problem import load
from .report import Report
from .tasks import TASKS, Options, run

EXIT_OK, EXIT_CHECK_FAILED, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phiconv", description="Abstract convexity over finite function spans.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--no-timing", action="store_true", help="omit timing fields from JSON output")

    for name in TASKS:
        sp = sub.add_parser(name)
        sp.add_argument("--problem", required=True, help="problem file (JSON)")
        sp.add_argument("--set", dest="set", help="named set from the problem file (default: every point)")
        sp.add_argument("--ambient", help="named ambient set (default: every point)")
        sp.add_argument("--mode", choices=("extremal", "exposed", "milman"))
        sp.add_argument("--tol", type=float)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--budget", type=int)
        sp.add_argument("--radius", type=float)
        common(sp)

    g = sub.add_parser("gallery")
    g.add_argument("--name", required=True, help=f"one of {', '.join(NAMES)}; args may be inlined, e.g. truncated_cube(4)")
    g.add_argument("--n", type=int, help="cube dimension or number of polytope points")
    g.add_argument("--dim", type=int, dest="d", help="ambient dimension for random_polytope")
    g.add_argument("--angles", type=int, dest="n_angles", help="angular samples for stadium")
    common(g)
    return p


def _emit(rep: Report, args) -> None:
    text = rep.to_text() if args.format == "text" else rep.to_json(timing=not args.no_timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gallery":
            rep = gallery(args.name, n=args.n, d=args.d, seed=args.seed, n_angles=args.n_angles)
        else:
            prob = load(args.problem)
            flags = {k: getattr(args, k) for k in ("set", "ambient", "mode", "tol", "seed", "samples",
                                                   "epsilon", "budget", "radius")}
            if args.mode is None and args.command == "check" and "mode" not in prob.task:
                flags["mode"] = "exposed"
            rep = run(args.command, prob, Options.merged(prob.task, **flags))
    except PhiConvexError as e:
        print(f"phiconv: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    _emit(rep, args)
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
