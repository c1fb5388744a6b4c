"""Command line front end.

    fountain-bfa fer --n 100 --l 100 --p0 0.99 --overheads 10,20,40 --out fer.csv
    fountain-bfa bounds --n 10 --l 10 --p0 0.9 --m 15,20,25 --out bounds.csv

A ``--config FILE`` of ``key = value`` lines (keys spelled like the long
flags, ``#`` starts a comment) supplies defaults; flags on the command line
win.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from typing import Sequence

from . import bounds
from .sim import Code, DecoderKind, ExperimentConfig, run_sweep, write_csv

log = logging.getLogger("fountain_bfa")


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.replace(" ", "").split(",") if v]


def _ints(s: str) -> list[int]:
    out = []
    for part in s.replace(" ", "").split(","):
        if not part:
            continue
        if ":" in part:
            a, b = part.split(":", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; dashes and underscores in keys are interchangeable."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = (t.strip() for t in line.split("=", 1))
            values[k.lstrip("-").replace("-", "_")] = v
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fountain-bfa", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value file with defaults for any flag")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--l", type=int, required=True)
        sp.add_argument("--p0", type=_floats, required=True, help="comma-separated list")
        sp.add_argument("--out", help="CSV path (default stdout)")

    fer = sub.add_parser("fer", help="Monte Carlo frame-error rates")
    common(fer)
    fer.add_argument("--overheads", type=_floats, required=True,
                     help="comma-separated; m = round((n + overhead) / p0)")
    fer.add_argument("--code", choices=[c.value for c in Code], default="lt")
    fer.add_argument("--delta", type=float, default=0.01)
    fer.add_argument("--c", type=float, default=0.02)
    fer.add_argument("--decoder", choices=[d.value for d in DecoderKind], default="bfa-efficient")
    fer.add_argument("--max-iter", type=int, default=100, help="BP iterations")
    fer.add_argument("--seed", type=int, default=0)
    fer.add_argument("--min-frame-errors", type=int, default=50)
    fer.add_argument("--max-trials", type=int, default=100_000)
    fer.add_argument("--threads", type=int, default=1)

    bnd = sub.add_parser("bounds", help="analytical success-probability bounds")
    common(bnd)
    bnd.add_argument("--m", type=_ints, required=True, help="list, ranges as a:b")
    bnd.add_argument("--eps-points", type=int, default=64)
    bnd.add_argument("--skip-p-G", action="store_true", help="omit the exact P(G) table")
    return p


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and argv and argv[0] in ("fer", "bounds"):
        # file values go in front so explicit flags parse later and win
        extra = []
        for k, v in read_config(known.config).items():
            flag = "--" + k.replace("_", "-")
            if k == "skip_p_G" or flag == "--skip-p-g":
                if v.lower() in ("1", "true", "yes"):
                    extra.append("--skip-p-G")
                continue
            extra += [flag, v]
        argv = [argv[0]] + extra + argv[1:]
    return parser.parse_args(argv)


def _open_out(path: str | None):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_fer(args) -> int:
    cfg = ExperimentConfig(
        n=args.n, l=args.l, p0_list=tuple(args.p0), overhead_list=tuple(args.overheads),
        code=Code(args.code), delta=args.delta, c=args.c, decoder=DecoderKind(args.decoder),
        max_iter=args.max_iter, master_seed=args.seed, min_frame_errors=args.min_frame_errors,
        max_trials=args.max_trials, threads=args.threads)
    points = run_sweep(cfg)
    for p in points:
        if p.censored:
            log.warning("p0=%g overhead=%g censored: %d errors in %d trials",
                        p.p0, p.overhead, p.frame_errors_EF, p.trials)
    fh = _open_out(args.out)
    try:
        write_csv(points, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _fmt(v) -> str:
    return "" if v is None else repr(v)


def cmd_bounds(args) -> int:
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(bounds.BOUND_COLUMNS)
        for p0 in args.p0:
            for m in args.m:
                row = bounds.all_bounds(p0, args.n, args.l, m, args.eps_points,
                                        with_p_G=not args.skip_p_G)
                w.writerow([_fmt(row[c]) for c in bounds.BOUND_COLUMNS])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "fer":
            return cmd_fer(args)
        return cmd_bounds(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
