"""Command-line entry point: ``lebgeom <subcommand> [options]``.

Exit status: 0 on success, 1 on a computation error or table mismatch, 2 on
a usage error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import convexity1d, extrema1d, io, lebesgue1d, lebesgue2d, maxima2d, nodes1d, nodes2d, tables
from .errors import LebesgueError, NotFound
from .precision import PrecisionContext

FAMILIES_1D = sorted(nodes1d.GENERATORS)
FAMILIES_2D = sorted(nodes2d.GENERATORS_2D)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _bits(text):
    v = int(text)
    if v < 53:
        raise argparse.ArgumentTypeError("precision must be >= 53 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--precision", type=_bits, default=None, help="mantissa bits for extended precision")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker processes for table rows")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--long", action="store_true", help="enable long-running rows and degrees > 600")

    p = argparse.ArgumentParser(prog="lebgeom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nodes", parents=[common], help="1D node set")
    s.add_argument("--family", choices=FAMILIES_1D, required=True)
    s.add_argument("--degree", type=_nonneg_int, required=True)

    s = sub.add_parser("nodes2d", parents=[common], help="Padua / Morrow-Patterson points")
    s.add_argument("--family", choices=FAMILIES_2D, required=True)
    s.add_argument("--degree", type=_positive_int, required=True)
    s.add_argument("--parity", type=int, choices=(0, 1), default=None)

    s = sub.add_parser("eval", parents=[common], help="sample the 1D Lebesgue function")
    s.add_argument("--family", choices=FAMILIES_1D, required=True)
    s.add_argument("--degree", type=_nonneg_int, required=True)
    s.add_argument("--grid-size", type=_positive_int, default=1001)

    s = sub.add_parser("maxset", parents=[common], help="constant and max-set of a 1D node set")
    s.add_argument("--family", choices=FAMILIES_1D, required=True)
    s.add_argument("--degree", type=_positive_int, required=True)
    s.add_argument("--tol", type=_positive_float, default=extrema1d.DEFAULT_TOL)

    s = sub.add_parser("check-theorem", parents=[common], help="endpoint exclusion report")
    s.add_argument("--family", choices=FAMILIES_1D, required=True)
    s.add_argument("--degree", type=_positive_int, required=True)
    s.add_argument("--scale", type=_positive_float, default=None,
                   help="scale factor c in (0, 1]; 'threshold' via --scale-to-threshold")
    s.add_argument("--scale-to-threshold", action="store_true", help="use c = 1 - a(n)/n^2")
    s.add_argument("--random-sets", type=_nonneg_int, default=0,
                   help="also test the log lower bound on this many random node sets")

    s = sub.add_parser("convexity", parents=[common], help="minimal degree for convexity near nodes")
    s.add_argument("--family", choices=convexity1d.SEARCH_FAMILIES, required=True)
    s.add_argument("--m", type=_positive_int, required=True)
    s.add_argument("--n-max", type=_positive_int, default=None)
    s.add_argument("--bits", type=_bits, default=None)

    for name, helptext in (("surface2d", "Lebesgue function on a grid"), ("curves", "cardinal zero curves")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--family", choices=FAMILIES_2D, required=True)
        s.add_argument("--degree", type=_positive_int, required=True)
        s.add_argument("--res", type=_positive_int, default=None)
        if name == "curves":
            s.add_argument("--node", type=_nonneg_int, default=None, help="node index (default: all)")

    s = sub.add_parser("maxima2d", parents=[common], help="count local maxima on the square")
    s.add_argument("--family", choices=FAMILIES_2D, required=True)
    s.add_argument("--degree", type=_positive_int, required=True)
    s.add_argument("--res", type=_positive_int, default=None)
    s.add_argument("--refine-tol", type=_positive_float, default=1e-9)
    s.add_argument("--report-excess", action="store_true")

    s = sub.add_parser("reproduce", parents=[common], help="recompute a reference table")
    s.add_argument("--table", type=int, choices=(1, 2, 3, 4), required=True)
    return p


# ------------------------------------------------------------------ handlers


def _emit_json(args, payload):
    io.write_json(payload, args.output)


def _cmd_nodes(args):
    ns = nodes1d.generate(args.family, args.degree)
    if args.format == "csv":
        io.write_csv(["x"], ((v,) for v in ns.nodes), args.output)
        return 0
    payload = ns.to_json()
    if args.precision:
        payload["nodes"] = nodes1d.format_mp(nodes1d.nodes_mp(ns, args.precision), args.precision)
        payload["precision_bits"] = args.precision
    _emit_json(args, payload)
    return 0


def _cmd_nodes2d(args):
    if args.parity is not None and args.family != "padua":
        raise _Usage("--parity applies to padua only")
    ns = nodes2d.padua(args.degree, args.parity) if args.parity is not None else nodes2d.generate2d(args.family, args.degree)
    if args.format == "csv":
        io.write_csv(["x", "y"], ns.points, args.output)
    else:
        _emit_json(args, ns.to_json())
    return 0


def _cmd_eval(args):
    ns = nodes1d.generate(args.family, args.degree)
    grid = np.linspace(-1.0, 1.0, args.grid_size) if args.grid_size > 1 else np.array([0.0])
    pairs = lebesgue1d.sample(ns, grid)
    if args.format == "json":
        _emit_json(args, {"family": ns.family, "degree": ns.degree,
                          "x": [p[0] for p in pairs], "lambda": [p[1] for p in pairs]})
    else:
        io.write_sample_csv(pairs, args.output)
    return 0


def _cmd_maxset(args):
    ns = nodes1d.generate(args.family, args.degree)
    payload = extrema1d.max_set(ns, args.tol).to_json()
    payload.update(family=ns.family, degree=ns.degree)
    _emit_json(args, payload)
    return 0


def _cmd_check_theorem(args):
    ns = nodes1d.generate(args.family, args.degree)
    if args.scale is not None and args.scale_to_threshold:
        raise _Usage("--scale and --scale-to-threshold are exclusive")
    c = 1.0
    if args.scale_to_threshold:
        c = 1.0 - extrema1d.separation_bound_a(ns.degree) / ns.degree**2
    elif args.scale is not None:
        if args.scale > 1.0:
            raise _Usage("--scale must lie in (0, 1]")
        c = args.scale
    scaled = nodes1d.scale(ns, c)
    payload = {"family": ns.family, "degree": ns.degree, "c": c,
               "report": extrema1d.boundary_exclusion_check(scaled).to_json()}
    if args.random_sets:
        rng = np.random.default_rng(args.seed)
        bound = extrema1d.brutman_lower_bound(ns.degree)
        worst = np.inf
        for _ in range(args.random_sets):
            x = np.sort(rng.uniform(-1.0, 1.0, ns.degree + 1))
            worst = min(worst, extrema1d.lebesgue_constant(nodes1d.custom(x)) - bound)
        payload["lower_bound"] = {"bound": bound, "trials": args.random_sets, "seed": args.seed,
                                  "min_margin": float(worst), "holds": bool(worst > 0)}
    _emit_json(args, payload)
    return 0


def _cmd_convexity(args):
    cap = 2000 if args.long else tables.LONG_DEGREE
    n_max = min(args.n_max, cap) if args.n_max else cap
    bits = args.bits or args.precision
    ctx = PrecisionContext(bits) if bits else None
    try:
        res = convexity1d.convexity_search(args.family, args.m, ctx, n_max)
    except NotFound:
        _emit_json(args, {"family": args.family, "m": args.m, "min_degree": None, "n_max": n_max})
        return 1
    _emit_json(args, res.to_json())
    return 0


def _cmd_surface2d(args):
    ce = lebesgue2d.build_cardinal_evaluator(nodes2d.generate2d(args.family, args.degree))
    res = args.res or 64 * (args.degree + 1)
    g = lebesgue2d.grid_axis(res)
    lam = lebesgue2d.lebesgue_grid(ce, g, g)
    if args.format == "json":
        _emit_json(args, {"family": args.family, "degree": args.degree, "axis": g, "lambda": lam})
    else:
        io.write_surface_csv(g, g, lam, args.output)
    return 0


def _cmd_curves(args):
    ce = lebesgue2d.build_cardinal_evaluator(nodes2d.generate2d(args.family, args.degree))
    idx = range(ce.size) if args.node is None else [args.node]
    curves = [lebesgue2d.zero_curves(ce, j, args.res) for j in idx]
    _emit_json(args, {"family": args.family, "degree": args.degree,
                      "curves": [c.to_json() for c in curves]})
    return 0


def _cmd_maxima2d(args):
    if args.degree < 2:
        raise _Usage("maxima2d needs --degree >= 2")
    ce = lebesgue2d.build_cardinal_evaluator(nodes2d.generate2d(args.family, args.degree))
    cnt = maxima2d.count_maxima(args.family, args.degree, args.res, args.refine_tol, ce=ce)
    payload = cnt.to_json()
    payload["bounds_check"] = maxima2d.lower_bound_check(args.degree, (cnt.interior, cnt.total))
    if args.report_excess:
        payload["excess"] = maxima2d.excess_maxima_report(ce, cnt.result)
    _emit_json(args, payload)
    return 0 if cnt.stable else 1


def _table_row(table, key):
    family, ref = tables.TABLES[table]
    if table in (1, 2):
        got = convexity1d.min_degree_for_convexity(family, key, n_max=max(2000, ref[key] + 100))
    else:
        cnt = maxima2d.count_maxima(family, key)
        got = (cnt.interior, cnt.total)
    return key, got


def reproduce_tables(which: int, long: bool = False, threads: int = 1) -> dict:
    family, ref = tables.TABLES[which]
    keys = [k for k in ref if long or not tables.is_long_row(which, k)]
    skipped = [k for k in ref if k not in keys]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = dict(pool.map(_table_row, [which] * len(keys), keys))
    else:
        results = dict(_table_row(which, k) for k in keys)
    rows = []
    for k in keys:
        exp = ref[k]
        got = results[k]
        rows.append({"key": k, "expected": exp, "computed": got, "match": tuple(np.atleast_1d(exp)) == tuple(np.atleast_1d(got))})
    return {"table": which, "family": family, "rows": rows, "skipped": skipped,
            "mismatches": [r["key"] for r in rows if not r["match"]]}


def _cmd_reproduce(args):
    report = reproduce_tables(args.table, args.long, args.threads)
    _emit_json(args, report)
    for r in report["rows"]:
        if not r["match"]:
            print(f"table {args.table} row {r['key']}: expected {r['expected']}, computed {r['computed']}",
                  file=sys.stderr)
    return 1 if report["mismatches"] else 0


HANDLERS = {
    "nodes": _cmd_nodes,
    "nodes2d": _cmd_nodes2d,
    "eval": _cmd_eval,
    "maxset": _cmd_maxset,
    "check-theorem": _cmd_check_theorem,
    "convexity": _cmd_convexity,
    "surface2d": _cmd_surface2d,
    "curves": _cmd_curves,
    "maxima2d": _cmd_maxima2d,
    "reproduce": _cmd_reproduce,
}


class _Usage(Exception):
    pass


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except _Usage as exc:
        parser.error(str(exc))
    except LebesgueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
