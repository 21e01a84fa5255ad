"""Command-line front end.

Exit codes: 0 success, 1 numerical failure or failed self-check, 2 bad input,
3 infeasible point, 4 LICQ failure, 5 unsupported feature.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import catalog, conformance
from .errors import (
    ExprSyntaxError,
    InfeasiblePointError,
    LicqError,
    PathDivergenceError,
    SnoError,
    UnsupportedConeError,
)
from .levelset import MIN_RESOLUTION, sweep
from .problem import SnoProblem, load_problem
from .regularization import path_follow
from .report import StationarityReport, analyze_point
from .scan import stratified_scan
from .tolerances import DEFAULT, Tolerances

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_LICQ = 4
EXIT_UNSUPPORTED = 5

DEFAULT_BOX = (-0.5, 1.5)


class InputError(Exception):
    """Bad command-line values; maps to exit code 2."""


# ---------------------------------------------------------------------------
# argument parsing

def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"cannot read {what} from {text!r}") from None


def parse_point(text: str, n: int) -> list[float]:
    point = _floats(text, "point")
    if len(point) != n:
        raise InputError(f"point has {len(point)} coordinates, problem has n = {n}")
    return point


def parse_box(text: str | None, n: int) -> list[tuple[float, float]]:
    if text is None:
        return [DEFAULT_BOX] * n
    axes = [_floats(part, "box") for part in text.split(";")]
    if len(axes) != n or any(len(a) != 2 for a in axes):
        raise InputError(f"box needs {n} 'lo,hi' pairs separated by ';', got {text!r}")
    return [(a[0], a[1]) for a in axes]


def parse_levels(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise InputError(f"levels must read 'amin,amax,steps', got {text!r}")
    lo, hi = _floats(",".join(parts[:2]), "levels")
    try:
        steps = int(parts[2])
    except ValueError:
        raise InputError(f"level count must be an integer, got {parts[2]!r}") from None
    if not lo < hi or steps < 2:
        raise InputError("levels need amin < amax and at least two steps")
    return lo, hi, steps


def resolve_problem(source: str) -> SnoProblem:
    """Load a problem file, or one of the bundled instances by name."""
    path = Path(source)
    if not path.exists() and source in catalog.ALL:
        return catalog.ALL[source]()
    try:
        return load_problem(path)
    except OSError as err:
        raise InputError(f"cannot read problem file {source!r}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{source}: invalid JSON ({err})") from None


def tolerances(args) -> Tolerances:
    try:
        return Tolerances(
            activity=args.tol_activity, zero=args.tol_zero, w=DEFAULT.w, eig=args.tol_eig
        )
    except ValueError as err:
        raise InputError(str(err)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snostat",
        description="Stationarity, Morse data and regularization for structured nonsmooth problems.",
    )
    parser.add_argument("--examples", "--paper-examples", dest="examples", action="store_true",
                        help="run the bundled instances and print a conformance summary")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True,
                        help="problem JSON file, or the name of a bundled instance")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--tol-activity", type=float, default=DEFAULT.activity)
    common.add_argument("--tol-zero", type=float, default=DEFAULT.zero)
    common.add_argument("--tol-eig", type=float, default=DEFAULT.eig)

    sub = parser.add_subparsers(dest="command")
    p = sub.add_parser("classify", parents=[common], help="classify a single point")
    p.add_argument("--point", required=True, help='coordinates, e.g. "0,0"')

    p = sub.add_parser("scan", parents=[common], help="find all stationary points in a box")
    p.add_argument("--box", help='bounds per axis, e.g. "-0.5,1.5;-0.5,1.5"')

    p = sub.add_parser("regularize", parents=[common], help="follow a relaxed KKT path")
    p.add_argument("--point", required=True, help="start point near a KKT point at t0")
    p.add_argument("--t0", type=float, default=0.01)
    p.add_argument("--theta", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=6)

    p = sub.add_parser("levelsets", parents=[common], help="component counts of lower level sets")
    p.add_argument("--box", help='bounds per axis, e.g. "-0.5,1.5;-0.5,1.5"')
    p.add_argument("--resolution", type=int, default=400)
    p.add_argument("--levels", required=True, help='"amin,amax,steps"')
    return parser


# ---------------------------------------------------------------------------
# rendering

def _yn(flag) -> str:
    if flag is None:
        return "n/a"
    return "yes" if flag else "no"


def _num(v) -> str:
    return "-" if v is None else f"{v:.10g}"


def _pt(x) -> str:
    return "(" + ", ".join(_num(v) for v in x) + ")"


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _saddle_text(rep: StationarityReport) -> str:
    s = rep.saddle
    if s.is_regular:
        kind = "regular first-order saddle"
    elif s.is_singular:
        kind = "singular first-order saddle"
    elif s.is_first_order_saddle:
        kind = "first-order saddle"
    else:
        kind = "not a first-order saddle"
    labels = ", ".join(f"{i + 1}:{lab.value}" for i, lab in sorted(s.per_index.items()))
    return f"{kind} [{labels}]" if labels else kind


def classify_table(p: SnoProblem, rep: StationarityReport) -> str:
    f = rep.flags
    rows = [
        ("problem", p.name or "-"),
        ("point", _pt(rep.point)),
        ("feasible", "yes"),
        ("f", _num(rep.value)),
        ("LICQ", f"{_yn(rep.licq.holds)} (rank {rep.licq.rank})"),
        ("biactive", ", ".join(str(i + 1) for i in rep.pattern.biactive) or "-"),
        ("lambda1", ", ".join(_num(v) for v in rep.multipliers.lam1)),
        ("lambda2", ", ".join(_num(v) for v in rep.multipliers.lam2)),
        ("residual", f"{rep.multipliers.residual:.3g}"),
        ("W", _yn(f.w)),
        ("Nhat", _yn(f.frechet_hat)),
        ("N", _yn(f.limiting)),
        ("T", _yn(f.t_stationary)),
        ("Nbar", _yn(f.clarke_bar)),
        ("C", _yn(rep.c_stationary)),
        ("saddle", _saddle_text(rep)),
        ("QI/BI/TI", f"{rep.morse.qi}/{rep.morse.bi}/{rep.morse.ti}"),
        ("ND1/ND2/ND3", "/".join(_yn(v) for v in (rep.morse.nd1, rep.morse.nd2, rep.morse.nd3))),
        ("verdict", rep.morse.verdict.value),
    ]
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


SCAN_COLUMNS = ["point", "f", "Nhat", "N", "T", "Nbar", "C", "saddle", "QI", "BI", "TI", "verdict"]


def _scan_row(rep: StationarityReport) -> list[str]:
    f = rep.flags
    return [
        _pt(rep.point), _num(rep.value), _yn(f.frechet_hat), _yn(f.limiting),
        _yn(f.t_stationary), _yn(f.clarke_bar), _yn(rep.c_stationary), _saddle_text(rep),
        str(rep.morse.qi), str(rep.morse.bi), str(rep.morse.ti), rep.morse.verdict.value,
    ]


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n"  # noqa: E731
    return line(header) + line(["-" * w for w in widths]) + "".join(line(r) for r in rows)


# ---------------------------------------------------------------------------
# commands

def cmd_classify(args, p: SnoProblem, tols: Tolerances) -> str:
    rep = analyze_point(p, parse_point(args.point, p.n), tols)
    if args.format == "json":
        return _json(rep.to_dict())
    if args.format == "csv":
        return _csv([SCAN_COLUMNS, _scan_row(rep)])
    return classify_table(p, rep)


def cmd_scan(args, p: SnoProblem, tols: Tolerances) -> str:
    result = stratified_scan(p, parse_box(args.box, p.n), tols=tols)
    if args.format == "json":
        return _json(result.to_list())
    rows = [_scan_row(r) for r in result.reports]
    if args.format == "csv":
        return _csv([SCAN_COLUMNS, *rows])
    return _table(SCAN_COLUMNS, rows) + f"{len(rows)} stationary point(s)\n"


def cmd_regularize(args, p: SnoProblem, tols: Tolerances) -> str:
    start = parse_point(args.point, p.n)
    try:
        path = path_follow(p, start, args.t0, args.theta, args.steps, tols)
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.format == "json":
        return _json(path.to_list())
    rows = [[f"{s.t:.6g}", _pt(s.x), f"{s.residual:.3g}"] for s in path.states]
    if args.format == "csv":
        return _csv([["t", "x", "kkt_residual"], *rows])
    out = _table(["t", "x", "kkt_residual"], rows)
    out += f"last iterate  {_pt(path.limit)}\n"
    if path.limit_report is not None:
        rep = path.limit_report
        out += f"limit point   {_pt(path.limit_point)}\n"
        out += (f"notions       Nhat={_yn(rep.flags.frechet_hat)} N={_yn(rep.flags.limiting)} "
                f"T={_yn(rep.flags.t_stationary)} Nbar={_yn(rep.flags.clarke_bar)}\n")
        out += f"verdict       {rep.morse.verdict.value}\n"
    if path.note:
        out += f"note          {path.note}\n"
    return out


def cmd_levelsets(args, p: SnoProblem, tols: Tolerances):
    if args.resolution < MIN_RESOLUTION:
        raise InputError(f"resolution must be at least {MIN_RESOLUTION}")
    lo, hi, steps = parse_levels(args.levels)
    if p.n != 2:
        raise UnsupportedConeError(f"level sets are only available for n = 2, got n = {p.n}")
    profile = sweep(p, parse_box(args.box, p.n), args.resolution, lo, hi, steps)
    if args.format == "csv":
        return profile.to_csv(), profile.to_json() + "\n"
    if args.format == "json":
        data = profile.summary()
        data["entries"] = [
            {"a": e.a, "components": e.components, "feasible_cells": e.feasible_cells}
            for e in profile.entries
        ]
        return _json(data)
    rows = [[f"{e.a:.6g}", str(e.components), str(e.feasible_cells)] for e in profile.entries]
    out = _table(["a", "components", "feasible_cells"], rows)
    for c in profile.changes:
        out += (f"change at a={c.level:.6g}: {c.before} -> {c.after}, "
                f"nearest T-stationary value {_num(c.nearest_critical_value)} "
                f"(gap {_num(c.gap)})\n")
    return out


COMMANDS = {
    "classify": cmd_classify,
    "scan": cmd_scan,
    "regularize": cmd_regularize,
    "levelsets": cmd_levelsets,
}


def run_examples(out) -> int:
    checks = conformance.run_all()
    for c in checks:
        out.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}\n")
    passed = sum(c.passed for c in checks)
    out.write(f"{passed}/{len(checks)} checks passed\n")
    return EXIT_OK if passed == len(checks) else EXIT_FAILURE


def _emit(text: str, target: str | None):
    if target is None:
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.examples:
        return run_examples(sys.stdout)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT

    try:
        p = resolve_problem(args.problem)
        tols = tolerances(args)
        output = COMMANDS[args.command](args, p, tols)
    except (InputError, ExprSyntaxError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasiblePointError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except LicqError as err:
        print(f"LICQ: {err}", file=sys.stderr)
        return EXIT_LICQ
    except UnsupportedConeError as err:
        print(f"unsupported: {err}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except PathDivergenceError as err:
        print(f"path failed: {err}", file=sys.stderr)
        return EXIT_FAILURE
    except SnoError as err:
        # Malformed problem descriptions and similar input faults.
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT

    if isinstance(output, tuple):
        table, companion = output
        _emit(table, args.out)
        if args.out is not None:
            _emit(companion, str(Path(args.out).with_suffix(".json")))
    else:
        _emit(output, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
