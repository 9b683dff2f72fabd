"""riskdist command line.

    riskdist measure    --dist SPEC --g SPEC
    riskdist decompose  --d1 SPEC --d2 SPEC --g SPEC [--method M] [--verify] [--n N] [--alpha A]
    riskdist dispersive --x SPEC --y SPEC [--grid-n N]
    riskdist verify     [--only LIST] [--n N]
    riskdist table      --d1 SPEC --d2 SPEC --p 0.9,0.95,0.99

Exit codes: 0 ok, 1 bad input, 2 numerical failure, 3 forced method not
applicable, 4 dispersive verdict incomparable, 5 verification failed.
Data goes to stdout (or --out), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .decomposition import (METHODS, CounterLogNormalSum, Decomposition, applicability, evaluate_counter_sum,
                            lognormal_identical_tvar, lognormal_identical_var, lognormal_tvar_terms)
from .dependence import EQUAL, INCOMPARABLE, X_LE_Y, AggregatePosition, check_dispersive
from .distortion import TVaRCap, VaRIndicator, WangTransform
from .distributions import LogNormal
from .errors import ApplicabilityError, NumericalError, SpecParseError
from .oracle import default_n, empirical_rho, grid_sample
from .risk_measures import ltvar, rho, tvar, var
from .specs import parse_distortion, parse_distribution

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_NOT_APPLICABLE = 3
EXIT_INCOMPARABLE = 4
EXIT_VERIFY_FAILED = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return f"{x:.12g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, float):
        return float(fmt(x)) if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# -- output -------------------------------------------------------------------------

def record(command, inputs, value, method=None, branch=None, oracle_delta=None, diagnostics=None) -> dict:
    return {"command": command, "inputs": inputs, "value": value, "method": method, "branch": branch,
            "oracle_delta": oracle_delta, "diagnostics": diagnostics or {}}


def _flat(rec: dict) -> dict:
    row = {"command": rec["command"]}
    for k, v in rec["inputs"].items():
        row[k] = v
    for k in ("value", "method", "branch", "oracle_delta"):
        row[k] = rec[k]
    for k, v in rec["diagnostics"].items():
        if not isinstance(v, (dict, list)):
            row[k] = v
    return row


def render(records: list[dict], style: str) -> str:
    if style == "json":
        return "".join(json.dumps(_jsonable(r)) + "\n" for r in records)
    rows = [_flat(r) for r in records]
    if style == "csv":
        return render_rows(rows, "csv")
    out = []
    for rec, row in zip(records, rows):
        width = max(len(k) for k in row)
        for k, v in row.items():
            out.append(f"{k.ljust(width)}  {fmt(v)}")
        for k, v in rec["diagnostics"].items():
            if isinstance(v, dict):
                out.append(f"{k}:")
                for kk, vv in v.items():
                    out.append(f"  {kk}: {fmt(vv) if not isinstance(vv, dict) else json.dumps(_jsonable(vv))}")
        out.append("")
    return "\n".join(out)


def render_rows(rows: list[dict], style: str) -> str:
    """Same-keyed rows as CSV or an aligned text table."""
    if not rows:
        return ""
    keys = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    if style == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow([fmt(row.get(k)) for k in keys])
        return buf.getvalue()
    cells = [[fmt(row.get(k)) for k in keys] for row in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.rjust(w) for k, w in zip(keys, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(cell, widths)) for cell in cells]
    return "\n".join(lines) + "\n"


def emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def note(msg: str) -> None:
    print(msg, file=sys.stderr)


# -- commands -------------------------------------------------------------------------

def cmd_measure(args) -> int:
    d = parse_distribution(args.dist)
    g = parse_distortion(args.g)
    res = rho(g, d)
    rec = record("measure", {"dist": str(d), "g": str(g)}, res.value, res.method, None, None, res.diagnostics)
    emit(render([rec], args.format), args.out)
    return EXIT_OK


def _oracle_value(g, d1, d2, n):
    heavy = isinstance(d1, LogNormal) or isinstance(d2, LogNormal)
    n = n or default_n(heavy)
    return empirical_rho(g, grid_sample(AggregatePosition.counter_pair(d1, d2), n)), n


def cmd_decompose(args) -> int:
    d1 = parse_distribution(args.d1)
    d2 = parse_distribution(args.d2)
    g = parse_distortion(args.g)
    if not 0.0 <= args.alpha <= 1.0:
        raise SpecParseError("alpha must lie in [0, 1]", str(args.alpha))
    try:
        res: Decomposition = evaluate_counter_sum(g, d1, d2, args.method, oracle_n=args.n, alpha=args.alpha)
    except ApplicabilityError as exc:
        note(f"no {args.method} path: {exc}")
        return EXIT_NOT_APPLICABLE
    diagnostics = dict(res.diagnostics)
    for label, value in res.addends:
        diagnostics[f"addend {label}"] = value
    if res.report is not None:
        diagnostics["applicability"] = res.report.as_dict()
    delta = None
    if args.verify:
        ref, n = _oracle_value(g, d1, d2, args.n)
        delta = res.value - ref
        diagnostics["oracle_value"] = ref
        diagnostics["oracle_n"] = float(n)
    rec = record("decompose", {"d1": str(d1), "d2": str(d2), "g": str(g), "alpha": args.alpha}, res.value,
                 res.method, res.branch, delta, diagnostics)
    emit(render([rec], args.format), args.out)
    return EXIT_OK


def cmd_dispersive(args) -> int:
    x = parse_distribution(args.x)
    y = parse_distribution(args.y)
    v = check_dispersive(x, y, args.grid_n, analytic=args.analytic)
    if v.ordering == X_LE_Y:
        statement = f"{x} <=disp {y}"
    elif v.ordering == EQUAL:
        statement = f"{x} =disp {y}"
    elif v.ordering == INCOMPARABLE:
        statement = f"{x} and {y} are not dispersively ordered on the grid"
    else:
        statement = f"{y} <=disp {x}"
    diagnostics = {"max_violation": v.max_violation, "grid_size": float(v.grid_size),
                   "grid_lo": v.grid_range[0], "grid_hi": v.grid_range[1],
                   "range_shrunk": v.range_shrunk, "analytic": v.analytic}
    rec = record("dispersive", {"x": str(x), "y": str(y)}, None, "grid" if not v.analytic else "analytic",
                 statement, None, {"ordering": v.ordering, **diagnostics})
    emit(render([rec], args.format), args.out)
    return EXIT_INCOMPARABLE if v.ordering == INCOMPARABLE else EXIT_OK


def cmd_verify(args) -> int:
    from . import verify

    numbers = verify.select(args.only)
    if args.n is not None:
        note(f"oracle N={args.n}; criteria whose default N is larger run in quick mode "
             f"(tolerances x{verify.QUICK_FACTOR:g})")
    rows, all_ok = [], True
    for k in numbers:
        res = verify.CRITERIA[k](args.n)
        note(res.summary())
        all_ok = all_ok and res.passed
        w = res.worst
        rows.append({"criterion": k, "title": res.title, "status": "PASS" if res.passed else "FAIL",
                     "cases": len(res.rows), "failed": len(res.failures),
                     "max_deviation": max((r.deviation for r in res.rows), default=0.0),
                     "worst_case": "" if w is None else w.label,
                     "worst_ratio": None if w is None else w.deviation / w.tolerance,
                     "seconds": res.elapsed})
    if args.format == "json":
        text = "".join(json.dumps(_jsonable(record("verify", {"criterion": r["criterion"]},
                                                           r["status"] == "PASS", None, r["title"], None,
                                                           {k: v for k, v in r.items()
                                                            if k not in ("criterion", "title")}))) + "\n"
                       for r in rows)
    else:
        text = render_rows(rows, args.format)
    emit(text, args.out)
    return EXIT_OK if all_ok else EXIT_VERIFY_FAILED


def _table_row(d1, d2, p, report) -> dict:
    row = {"p": p}
    if report.applicable:
        x1, x2 = (d1, d2) if report.chosen_orientation == 1 else (d2, d1)
        parts = {
            "var": (var(x1, p), var(x2, 1.0 - p)),
            "tvar": (tvar(x1, p), ltvar(x2, 1.0 - p)),
            "wt": (rho(WangTransform(p), x1).value, rho(WangTransform(1.0 - p), x2).value),
        }
        for key, (a, b) in parts.items():
            row[key] = a + b
            row[f"{key}_x1"] = a
            row[f"{key}_x2"] = b
        return row
    if isinstance(d1, LogNormal) and isinstance(d2, LogNormal):
        law = CounterLogNormalSum(d1, d2)
        roots = law.level_roots(p)
        a = math.exp(d1.mu + d1.sigma * roots.z_lo)
        b = math.exp(d2.mu - d2.sigma * roots.z_lo)
        row["var"] = lognormal_identical_var(d1.mu, d1.sigma, p) if law.identical else a + b
        row["var_x1"], row["var_x2"] = a, b
        t1, t2, t3 = lognormal_tvar_terms(d1, d2, p)
        row["tvar"] = lognormal_identical_tvar(d1.mu, d1.sigma, p) if law.identical else math.fsum((t1, t2, t3))
        row["tvar_lower_block"], row["tvar_upper_block"], row["tvar_level_term"] = t1, t2, t3
        row["wt"] = rho(WangTransform(p), law).value
        return row
    sample = grid_sample(AggregatePosition.counter_pair(d1, d2), default_n())
    for key, g in (("var", VaRIndicator(p)), ("tvar", TVaRCap(p)), ("wt", WangTransform(p))):
        row[key] = empirical_rho(g, sample)
    return row


def cmd_table(args) -> int:
    d1 = parse_distribution(args.d1)
    d2 = parse_distribution(args.d2)
    levels = []
    for item in args.p.split(","):
        try:
            p = float(item)
        except ValueError:
            raise SpecParseError("bad level", item) from None
        if not 0.0 < p < 1.0:
            raise SpecParseError("level must lie in (0, 1)", item)
        levels.append(p)
    report = applicability(d1, d2)
    if report.applicable:
        note(f"branch: {report.branch}")
    elif isinstance(d1, LogNormal) and isinstance(d2, LogNormal):
        note("branch: log-normal pair, root-pair formulas")
    else:
        note("branch: grid oracle (decomposition hypotheses fail)")
    rows = [_table_row(d1, d2, p, report) for p in levels]
    if args.format == "json":
        text = "".join(json.dumps(_jsonable(record("table", {"d1": str(d1), "d2": str(d2), "p": r["p"]},
                                                           r["var"], None, report.branch or None, None,
                                                           {k: v for k, v in r.items() if k != "p"}))) + "\n"
                       for r in rows)
    else:
        text = render_rows(rows, args.format)
    emit(text, args.out)
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riskdist", description="Distortion risk measures of dependent sums.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--out", help="write data here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", parents=[common], help="rho_g of one distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("decompose", parents=[common], help="rho_g of the counter-monotonic sum of two marginals")
    p.add_argument("--d1", required=True)
    p.add_argument("--d2", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--verify", action="store_true", help="also report the grid-oracle delta")
    p.add_argument("--n", type=int, help="oracle grid size (default 2^20, 2^22 for log-normal legs)")
    p.add_argument("--alpha", type=float, default=0.0, help="generalized inverse weight in [0, 1]")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("dispersive", parents=[common], help="grid check of the dispersive order")
    p.add_argument("--x", "--d1", dest="x", required=True)
    p.add_argument("--y", "--d2", dest="y", required=True)
    p.add_argument("--grid-n", type=int, default=10_001)
    p.add_argument("--analytic", action="store_true", help="decide normal/student pairs from parameters")
    p.set_defaults(func=cmd_dispersive)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance sweeps")
    p.add_argument("--only", help="comma list of criterion numbers or tags")
    p.add_argument("--n", type=int, help="oracle grid size; smaller than default means quick mode")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="VaR/TVaR/WT of the counter-monotonic sum by level")
    p.add_argument("--d1", required=True)
    p.add_argument("--d2", required=True)
    p.add_argument("--p", default="0.9,0.95,0.99", help="comma list of levels")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is not None and args.n < 1:
        parser.error("--n must be positive")
    try:
        return args.func(args)
    except SpecParseError as exc:
        note(f"riskdist: parse error: {exc}")
        return EXIT_INPUT
    except ValueError as exc:
        note(f"riskdist: invalid input: {exc}")
        return EXIT_INPUT
    except NumericalError as exc:
        note(f"riskdist: numerical error: {exc}")
        return EXIT_NUMERICAL
    except ApplicabilityError as exc:
        note(f"riskdist: not applicable: {exc}")
        return EXIT_NOT_APPLICABLE


if __name__ == "__main__":
    sys.exit(main())
