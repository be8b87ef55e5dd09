"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage, parse or domain error.
Errors are reported as one line on stderr::

    error code=<ErrorClass> message=<text>
"""

from __future__ import annotations

import argparse
import sys

from . import dimension as dim
from .dynamics import OperatorKind, classify_periodicity, evolve, shift
from .errors import IfsError
from .io import fmt, report_csv, write_pgm, write_report
from .metric import SpaceBox
from .osc import osc_check
from .raster import attractor_chaos_game, attractor_deterministic
from .scenario import load_scenario, serialize_scenario
from .sequence import distinct_system, sequence_distance
from .verify import SUITES, run_suites


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fail(code, message, status):
    print(f"error code={code} message={message}".replace("\n", " "), file=sys.stderr)
    return status


def _defaults(args, sc):
    d = sc.defaults
    return {
        "seed": d.seed if args.seed is None else args.seed,
        "tolerance": d.tolerance if args.tolerance is None else args.tolerance,
        "resolution": d.resolution if args.resolution is None else args.resolution,
        "horizon": d.horizon if args.horizon is None else args.horizon,
    }


def parse_box(text, space):
    """``space`` or ``lo1,lo2:hi1,hi2``."""
    if text == "space":
        return space
    try:
        lo, hi = text.split(":")
        return SpaceBox([float(v) for v in lo.split(",")], [float(v) for v in hi.split(",")])
    except ValueError:
        raise UsageError(f"open set must be 'space' or 'lo1,..:hi1,..', got {text!r}") from None


def cmd_distance(args, sc, opt):
    F, G = sc.sequence(args.seq1), sc.sequence(args.seq2)
    rep = sequence_distance(F, G, opt["tolerance"])
    print(f"value {fmt(rep.value)}")
    print(f"tail_bound {fmt(rep.tail_bound)}")
    print(f"truncation_depth {rep.truncation_depth}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("seq1,seq2,value,tail_bound,truncation_depth\n")
            fh.write(f"{args.seq1},{args.seq2},{fmt(rep.value)},{fmt(rep.tail_bound)},{rep.truncation_depth}\n")
    return 0


def cmd_shift(args, sc, opt):
    print(shift(sc.sequence(args.seq), args.steps))
    return 0


def _time(op, text):
    t = float(text)
    return int(t) if op.kind is OperatorKind.SHIFT and t.is_integer() else t


def cmd_evolve(args, sc, opt):
    op = sc.operator(args.operator)
    F = sc.sequence(args.seq)
    E = evolve(op, F, _time(op, args.time))
    print(E)
    if op.kind is OperatorKind.SCALE:
        for name in distinct_system(E).names:
            print(f"ratio {name} {fmt(E.alphabet[name].ratio)}")
    return 0


def cmd_classify(args, sc, opt):
    print(classify_periodicity(sc.sequence(args.seq), opt["horizon"]))
    return 0


def cmd_attractor(args, sc, opt):
    ifs = distinct_system(sc.sequence(args.seq))
    if args.method == "det":
        raster = attractor_deterministic(ifs, opt["resolution"], workers=args.workers)
    else:
        raster = attractor_chaos_game(ifs, opt["resolution"], args.points, opt["seed"], workers=args.workers)
    write_pgm(raster, args.out)
    print(f"occupied {raster.count}")
    print(f"pixel_diameter {fmt(raster.pixel_diameter)}")
    if args.figure:
        from .plotting import plot_raster

        plot_raster(raster, args.figure, f"{args.seq} ({args.method})")
    return 0


def cmd_dimension(args, sc, opt):
    ifs = distinct_system(sc.sequence(args.seq))
    rep = dim.similarity_dimension(ifs)
    print(f"s {fmt(rep.s)}")
    if args.operator is None:
        return 0
    op = sc.operator(args.operator)
    t = _time(op, args.time)
    E = distinct_system(evolve(op, sc.sequence(args.seq), t))
    resolved = dim.similarity_dimension(E)
    ratios = set(ifs.ratios)
    if op.preserves_parity and len(ratios) == 1:
        r = ratios.pop()
        formula = dim.evolved_dimension(rep.s, r, op.ratio_action(r, t))
        print(f"s_evolved_formula {fmt(formula.s)}")
    else:
        print("s_evolved_formula n/a")
    print(f"s_evolved_resolved {fmt(resolved.s)}")
    return 0


def cmd_osc(args, sc, opt):
    ifs = distinct_system(sc.sequence(args.seq))
    res = osc_check(ifs, parse_box(args.open_set, sc.space))
    print(res)
    if res.witness is not None:
        print("witness " + " ".join(fmt(v) for v in res.witness))
    return 0


def cmd_verify(args, sc, opt):
    names = SUITES if args.suite == "all" else (args.suite,)
    cases, data = run_suites(names, sc, opt["seed"], dimension={"resolution": opt["resolution"]})
    if args.report:
        write_report(cases, args.report)
    else:
        sys.stdout.write(report_csv(cases))
    if args.figures:
        from .plotting import render_report_figures

        for p in render_report_figures(data, args.figures):
            print(f"figure {p}", file=sys.stderr)
    return 0 if all(c.passed for c in cases) else 1


def cmd_dump(args, sc, opt):
    sys.stdout.write(serialize_scenario(sc))
    return 0


def build_parser():
    p = _Parser(prog="ifsdyn", description="Dynamics of iterated function systems.")
    p.add_argument("--scenario", default="sierpinski", help="scenario file or bundled name (default: sierpinski)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default 42)")
    p.add_argument("--tolerance", type=float, default=None, help="distance truncation tolerance (default 2^-40)")
    p.add_argument("--resolution", type=int, default=None, help="raster cells per axis (default 512)")
    p.add_argument("--horizon", type=int, default=None, help="aperiodicity horizon (default 10000)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("distance")
    s.add_argument("seq1")
    s.add_argument("seq2")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("shift")
    s.add_argument("seq")
    s.add_argument("--steps", type=int, default=1)
    s.set_defaults(func=cmd_shift)

    s = sub.add_parser("evolve")
    s.add_argument("seq")
    s.add_argument("--operator", required=True)
    s.add_argument("--time", required=True)
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("classify")
    s.add_argument("seq")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("attractor")
    s.add_argument("seq")
    s.add_argument("--method", choices=("det", "chaos"), default="det")
    s.add_argument("--out", required=True)
    s.add_argument("--points", type=int, default=1_000_000)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--figure", help="also render a PNG with matplotlib")
    s.set_defaults(func=cmd_attractor)

    s = sub.add_parser("dimension")
    s.add_argument("seq")
    s.add_argument("--operator")
    s.add_argument("--time", default="0")
    s.set_defaults(func=cmd_dimension)

    s = sub.add_parser("osc")
    s.add_argument("seq")
    s.add_argument("--open-set", default="space")
    s.set_defaults(func=cmd_osc)

    s = sub.add_parser("verify")
    s.add_argument("--suite", choices=("all",) + SUITES, default="all")
    s.add_argument("--report", help="CSV path (default: stdout)")
    s.add_argument("--figures", help="directory for matplotlib figures")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("dump", help="print the normalised scenario document")
    s.set_defaults(func=cmd_dump)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # global options may also follow the subcommand
    try:
        args = parser.parse_args(_hoist(argv))
        sc = load_scenario(args.scenario)
        opt = _defaults(args, sc)
        for key in ("resolution", "horizon"):
            if opt[key] < 1:
                raise UsageError(f"--{key} must be positive")
        if not 0 < opt["tolerance"] < 1:
            raise UsageError("--tolerance must lie in (0, 1)")
        return args.func(args, sc, opt)
    except UsageError as exc:
        return _fail("UsageError", str(exc), 2)
    except IfsError as exc:
        return _fail(exc.code, str(exc), 2)
    except (OSError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), 2)


def _hoist(argv):
    """Move global options written after the subcommand in front of it."""
    globals_ = {"--scenario", "--seed", "--tolerance", "--resolution", "--horizon"}
    front, back = [], []
    it = iter(argv)
    for tok in it:
        key = tok.split("=", 1)[0]
        if key in globals_:
            front.append(tok)
            if "=" not in tok:
                front.append(next(it, ""))
        else:
            back.append(tok)
    return front + back


if __name__ == "__main__":
    sys.exit(main())
