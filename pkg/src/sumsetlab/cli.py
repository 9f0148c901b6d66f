"""Command-line entry point: ``sumsetlab <command> ...``.

Exit codes: 0 success or pass, 1 usage error, 2 a verifier reported fail
(or no cover / no feasible set exists), 3 hypothesis violation, 4 capacity.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import experiments as ex
from . import inequalities as iq
from .errors import (
    CapacityError,
    HypothesisError,
    InfeasibleError,
    NoCoverError,
    SumsetLabError,
)
from .gap import ENUM_CAP, Gap, gap_hull
from .geometry import POINT_CAP, cover_number
from .lattice import PointSet, format_pointset, iterated_sumset, read_pointset, sumset
from .report import SCHEMA_VERSION, InequalityReport, json_value
from .transforms import compress, compress_fully, cube_summand_identity_check, ruzsa_cover

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_CAPACITY = 0, 1, 2, 3, 4

VERIFIERS = (
    "bm",
    "lev",
    "ap-containment",
    "box-shrinking",
    "bm-in-boxes",
    "superadditivity",
    "plunnecke",
    "stability",
    "cube-summand",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _frac_list(text):
    try:
        return tuple(Fraction(x) for x in text.split(",") if x)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], help="output format")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap-points", type=int, default=POINT_CAP)
    p.add_argument("--cap-enum", type=int, default=ENUM_CAP)
    p.add_argument("--normal-bound", "--bound", dest="normal_bound", type=int)
    p.add_argument("--threads", type=int)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="sumsetlab", description="Exact sumset computations and verifiers.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add("sumset", "A + B of two point-set files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--kernel", choices=["auto", "bitset", "pairwise"], default="auto")

    p = add("iterate", "h-fold sumset h.A")
    p.add_argument("--set", required=True)
    p.add_argument("--h", type=int, required=True)

    p = add("cover", "fewest parallel hyperplanes covering a set")
    p.add_argument("--set", required=True)

    p = add("gap-hull", "smallest X + P containing a subset of Z")
    p.add_argument("--set", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "heuristic"], default="exact")

    p = add("compress", "compress along one axis, or along all axes to a fixpoint")
    p.add_argument("--set", required=True)
    p.add_argument("--axis", type=int, help="1-based axis; omit for full compression")

    p = add("ruzsa-cover", "X in A with A inside X + B - B")
    p.add_argument("a")
    p.add_argument("b")

    p = add("verify", "run one inequality verifier")
    p.add_argument("statement", choices=VERIFIERS)
    p.add_argument("--set", help="A (or the single input set)")
    p.add_argument("--set-b", help="B")
    p.add_argument("--x", help="X for box-shrinking")
    p.add_argument("--y", help="Y for bm-in-boxes")
    p.add_argument("--z", help="Z for bm-in-boxes")
    p.add_argument("--gap", help='GAP record, e.g. "gap k=1 sides=9 coeffs=1 offset=0"')
    p.add_argument("--weights", help="JSON file with f, g, h (maps int -> rational) and d")
    p.add_argument("--h", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--epsilon", type=Fraction)

    p = add("simplex-table", "doubling of the discrete simplex")
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--n-max", type=int, default=10)

    p = add("tightness", "interval plus general-position points example")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--t", type=Fraction, default=Fraction(1, 64))
    p.add_argument("--m", type=int)
    p.add_argument("--no-ratio-check", action="store_true")

    p = add("search", "low-doubling sets off n parallel hyperplanes")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--strategy", choices=["exhaustive", "local"], default="local")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--store", help="JSON-lines frontier file to merge into")

    p = add("estimate", "largest empirical constant over a grid of families")
    p.add_argument("--family", choices=ex.FAMILIES, required=True)
    p.add_argument("--ks", type=_int_list, required=True)
    p.add_argument("--ns", type=_int_list, required=True)
    p.add_argument("--ts", type=_frac_list, default=(Fraction(1),))
    p.add_argument("--samples", type=int, default=1)
    return parser


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _pointset_out(args, a: PointSet, extra: dict | None = None) -> int:
    if args.format == "json":
        body = {"kind": "pointset", "schema_version": SCHEMA_VERSION, "dim": a.dim, "size": len(a), "points": [list(p) for p in a.points]}
        body.update(extra or {})
        _emit(args, _dump(body))
    else:
        _emit(args, format_pointset(a))
    return EXIT_OK


def _report_out(args, rep: InequalityReport) -> int:
    _emit(args, _dump(rep.to_json()))
    if not rep.hypotheses_ok:
        return EXIT_HYPOTHESIS
    return EXIT_OK if rep.passed else EXIT_FAIL


def _table_out(args, rows: list, columns: list) -> int:
    if args.format == "json":
        body = {"kind": "table", "schema_version": SCHEMA_VERSION, "columns": columns, "rows": [{c: json_value(r[c]) for c in columns} for r in rows]}
        _emit(args, _dump(body))
    else:
        _emit(args, ex.rows_to_csv(rows, columns))
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"verify {args.statement} needs " + ", ".join("--" + m for m in missing))


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("SUMSETLAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SUMSETLAB_THREADS must be an integer, got {env!r}")
    return 1


def _load_weights(path):
    with open(path) as fh:
        data = json.load(fh)
    try:
        fgh = [{int(x): Fraction(str(v)) for x, v in data[key].items()} for key in ("f", "g", "h")]
        return (*fgh, int(data["d"]))
    except (KeyError, ValueError, AttributeError) as err:
        raise UsageError(f"bad weights file: {err}")


def _verify(args) -> int:
    s = args.statement
    cap = args.cap_enum
    if s == "bm":
        _need(args, "set", "set-b", "n", "epsilon")
        rep = iq.verify_bm(read_pointset(args.set), read_pointset(args.set_b), args.n, args.epsilon, args.normal_bound)
    elif s == "lev":
        _need(args, "set", "h")
        rep = iq.verify_lev(read_pointset(args.set), args.h)
    elif s == "ap-containment":
        _need(args, "set", "m")
        rep = iq.verify_ap_containment(read_pointset(args.set), args.m)
    elif s == "box-shrinking":
        _need(args, "gap", "x", "set", "ell", "m")
        rep = iq.verify_box_shrinking(Gap.from_record(args.gap), read_pointset(args.x), read_pointset(args.set), args.ell, args.m, cap)
    elif s == "bm-in-boxes":
        _need(args, "y", "z", "gap", "ell", "n")
        rep = iq.verify_bm_in_boxes(read_pointset(args.y), read_pointset(args.z), Gap.from_record(args.gap), args.ell, args.n, cap)
    elif s == "superadditivity":
        _need(args, "weights")
        rep = iq.verify_superadditivity(*_load_weights(args.weights))
    elif s == "plunnecke":
        _need(args, "set", "set-b", "ell")
        rep = iq.verify_plunnecke(read_pointset(args.set), read_pointset(args.set_b), args.ell)
    elif s == "stability":
        _need(args, "set", "set-b", "gap")
        rep = iq.verify_stability_containment(read_pointset(args.set), read_pointset(args.set_b), Gap.from_record(args.gap), cap)
    else:
        _need(args, "set", "set-b")
        rep = cube_summand_identity_check(read_pointset(args.set), read_pointset(args.set_b))
    return _report_out(args, rep)


def _dispatch(args) -> int:
    c = args.command
    if c == "sumset":
        return _pointset_out(args, sumset(read_pointset(args.a), read_pointset(args.b), args.kernel))
    if c == "iterate":
        return _pointset_out(args, iterated_sumset(read_pointset(args.set), args.h))
    if c == "cover":
        cert = cover_number(read_pointset(args.set), args.normal_bound)
        _emit(args, _dump({"schema_version": SCHEMA_VERSION, **cert.to_json()}))
        return EXIT_OK
    if c == "gap-hull":
        res = gap_hull(read_pointset(args.set), args.n, args.k, args.mode)
        _emit(args, _dump({"schema_version": SCHEMA_VERSION, **res.to_json()}))
        return EXIT_OK
    if c == "compress":
        a = read_pointset(args.set)
        return _pointset_out(args, compress(a, args.axis) if args.axis else compress_fully(a))
    if c == "ruzsa-cover":
        return _pointset_out(args, ruzsa_cover(read_pointset(args.a), read_pointset(args.b)))
    if c == "verify":
        return _verify(args)
    if c == "simplex-table":
        rows = ex.simplex_doubling_table(args.k_max, args.n_max, args.cap_points)
        return _table_out(args, rows, ex.SIMPLEX_COLUMNS)
    if c == "tightness":
        _, _, rep = ex.tightness_example(
            args.k, args.n, args.t, args.m, seed=args.seed,
            check_ratios=not args.no_ratio_check, normal_bound=args.normal_bound or 1,
        )
        return _report_out(args, rep)
    if c == "search":
        store = ex.FrontierStore(args.store) if args.store else None
        rec = ex.extremal_search(
            args.k, args.n, args.size, args.budget, args.strategy, args.seed,
            args.normal_bound, args.restarts, store,
        )
        _emit(args, _dump({"schema_version": SCHEMA_VERSION, **rec.to_json()}))
        return EXIT_OK
    if c == "estimate":
        grid = ex.ExperimentGrid(
            args.ks, args.ns, args.ts, args.family, seed=args.seed, samples=args.samples,
            normal_bound=args.normal_bound or 2, cap_points=args.cap_points, threads=_threads(args),
        )
        return _table_out(args, ex.constant_estimation(grid), ex.ESTIMATE_COLUMNS)
    raise UsageError(f"unknown command {c!r}")


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as err:
        print(f"hypothesis violated: {err}", file=sys.stderr)
        for v in err.violations[:20]:
            print(f"  {v}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except CapacityError as err:
        print(f"capacity exceeded: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NoCoverError, InfeasibleError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_FAIL
    except (SumsetLabError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
