"""Command-line front end.

One job per invocation: a command plus a JSON parameter object (from --input
or inline defaults), producing a deterministic JSON (or TSV) report.  Exact
scalars are printed symbolically and, when the job carries a q, numerically.

Exit codes: 0 success, 2 validation failure (unknown command, schema
violation), 1 computation failure (module errors, wrapped with their origin).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import ehrhart as eh
from . import lambdaring as lr
from . import monoids as mo
from . import ratfun as rf
from . import stacky as st
from .scalar import ExactScalar, HalfLConvention, parse_rat

COMMANDS = ("ehrhart", "volume", "bps", "delta", "plid-check", "plethystic")


class SchemaViolation(Exception):
    pass


def _scalar_report(s: ExactScalar, q0=None):
    out = {"exact": s.to_json(), "display": str(s)}
    if q0 is not None:
        z = s.eval_numeric(q0)
        out["value_at_q"] = z.real if abs(z.imag) < 1e-12 else [z.real, z.imag]
    return out


def _require(params, key, types, what):
    if key not in params:
        raise SchemaViolation(f"missing required field {key!r} for {what}")
    v = params[key]
    if types and not isinstance(v, types):
        raise SchemaViolation(f"field {key!r} has wrong type for {what}")
    return v


def _parse_convention(params) -> HalfLConvention:
    raw = params.get("half_l", "1,1")
    if isinstance(raw, str):
        bits = raw.split(",")
    else:
        bits = list(raw)
    if len(bits) != 2:
        raise SchemaViolation("half_l must be two bits 'b1,b2'")
    try:
        return HalfLConvention(int(bits[0]), int(bits[1]))
    except ValueError as exc:
        raise SchemaViolation(str(exc)) from exc


def _cmd_ehrhart(params):
    if "vertices" in params:
        verts = [[parse_rat(str(c)) for c in v] for v in _require(params, "vertices", list, "ehrhart")]
        poly = eh.RationalPolytope.from_vertices(verts)
    else:
        rows = [[parse_rat(str(c)) for c in row] for row in _require(params, "A", list, "ehrhart")]
        rhs = [parse_rat(str(c)) for c in _require(params, "b", list, "ehrhart")]
        poly = eh.RationalPolytope(rows, rhs)
    delta = poly.vertex_denominator_lcm() if not poly.is_empty else 1
    big_d = poly.dim + 1
    order = int(params.get("truncation") or delta * big_d + delta + 2)
    series = eh.ehrhart_series(poly, order)
    report = {
        "polytope": poly.to_json(),
        "empty": poly.is_empty,
        "counts": [int(c.as_rational()) for c in series.coeffs],
    }
    if poly.is_empty:
        report["limit"] = _scalar_report(ExactScalar.zero())
        return report
    fit = rf.fit_rational(series, delta, big_d)
    report["fit"] = fit.to_json()
    report["limit"] = _scalar_report(fit.limit_at_infinity())
    return report


def _cmd_volume(params):
    n = _require(params, "n", int, "volume")
    k = _require(params, "torusRank", int, "volume")
    finite = params.get("finiteOrders", [])
    weights = _require(params, "weights", list, "volume")
    q = _require(params, "q", int, "volume")
    if not isinstance(finite, list) or not all(isinstance(d, int) for d in finite):
        raise SchemaViolation("finiteOrders must be a list of integers")
    if not all(isinstance(row, list) and all(isinstance(c, int) for c in row)
               for row in weights):
        raise SchemaViolation("weights must be a matrix of integers")
    if len(weights) != k + len(finite) or any(len(row) != n for row in weights):
        raise SchemaViolation(
            "weights must have torusRank + #finiteOrders rows and n columns"
        )
    fbar = params.get("fbar", "one")
    if fbar not in ("one", "gerbe"):
        raise SchemaViolation("fbar must be 'one' or 'gerbe'")
    datum = st.ToricStackDatum(n, k, finite, weights, q, params.get("fiber", "origin"))
    order = int(params.get("R") or params.get("truncation") or 12)
    series = st.volume_series(datum, fbar, order)
    fit = st.volume_fit(datum, fbar)
    return {
        "coefficients": [_scalar_report(c, q) for c in series.coeffs],
        "fit": fit.to_json(),
        "volume": _scalar_report(-fit.limit_at_infinity(), q),
    }


def _cmd_bps(params):
    quiver = mo.Quiver.from_json(
        {"vertices": _require(params, "vertices", int, "bps"),
         "arrows": params.get("arrows", [])}
    )
    q = _require(params, "q", int, "bps")
    gamma_bound = int(params.get("gammaBound") or params.get("grade") or 4)
    levels = int(params.get("levels") or 1)
    conv = _parse_convention(params)
    result = st.quiver_bps(quiver, q, gamma_bound, levels, conv)
    table = []
    for gamma, ve in sorted(result.per_gamma.items()):
        table.append(
            {"gamma": list(gamma),
             "omega": [_scalar_report(v, q) for v in ve.levels]}
        )
    return {"gamma_bound": gamma_bound, "levels": levels, "invariants": table}


def _cmd_delta(params):
    if "m" in params or "s" in params:
        m = _require(params, "m", int, "delta")
        s = _require(params, "s", int, "delta")
        region = eh.DeltaRegion(m, s)
        r_max = int(params.get("r") or params.get("truncation") or 24)
        modes = ("differences", "orbits")
        mode = params.get("mode") or params.get("delta_mode")
        if mode:
            if mode not in modes:
                raise SchemaViolation("mode must be differences|orbits")
            modes = (mode,)
        out = {"m": m, "s": s, "r_max": r_max}
        for md in modes:
            out[md] = {
                "counts": [eh.delta_count(region, r, md) for r in range(1, r_max + 1)],
                "limit": str(eh.delta_limit(region, md)),
            }
        return out
    report = st.delta_report(
        int(params.get("max_m") or 3),
        int(params.get("max_s") or 3),
        int(params.get("max_r") or 24),
    )
    return report


def _cmd_plid_check(params):
    grade = int(params.get("gradeBound") or params.get("grade") or 2)
    levels = int(params.get("levelBound") or params.get("levels") or 2)
    q = int(params.get("q") or 2)
    mode = params.get("delta_mode") or params.get("mode") or "differences"
    conv = _parse_convention(params)
    monoid = mo.LinearObjectsMonoid.vect(q, conv)
    report = st.plethystic_identity_residual(monoid, grade, levels, mode)
    return report.to_json()


def _cmd_plethystic(params):
    rank = int(params.get("rank") or 1)
    op = _require(params, "op", str, "plethystic")
    if op not in ("sym", "log", "log_direct"):
        raise SchemaViolation("op must be sym|log|log_direct")
    grade = int(params.get("grade") or 4)
    levels = int(params.get("levels") or 1)
    lattice = mo.DiscreteLattice(rank)
    budget = grade * levels
    f = lr.CountingFunction(lattice, grade, budget)
    for entry in _require(params, "values", list, "plethystic"):
        el = tuple(int(c) for c in entry["element"])
        lev = int(entry["level"])
        if lev <= budget:
            f.set(el, lev, ExactScalar.from_json(entry["value"]))
    if op == "sym":
        result = lr.pleth_sym(f)
    else:
        unit = lr.CountingFunction.unit(lattice, grade, budget)
        big = unit + f
        result = lr.pleth_log(big) if op == "log" else lr.log_direct(big)
    entries = [
        {"element": list(x), "level": n, "value": v.to_json(), "display": str(v)}
        for x, n, v in sorted(result.support(), key=lambda t: (t[1], t[0]))
    ]
    return {"op": op, "grade": result.grade_bound, "levels": result.level_bound,
            "values": entries}


_HANDLERS = {
    "ehrhart": _cmd_ehrhart,
    "volume": _cmd_volume,
    "bps": _cmd_bps,
    "delta": _cmd_delta,
    "plid-check": _cmd_plid_check,
    "plethystic": _cmd_plethystic,
}

_MODULE_ERRORS = (
    (rf.RatfunError, "ratfun"),
    (lr.LambdaRingError, "lambdaring"),
    (mo.MonoidError, "monoids"),
    (eh.EhrhartError, "ehrhart"),
    (st.StackyError, "stacky"),
)
_MODULE_ERROR_CLASSES = tuple(cls for cls, _ in _MODULE_ERRORS)


def _tsv(report) -> str:
    """Lossy flat view: one key<TAB>value line per scalar leaf."""
    lines = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}\t{obj}")

    walk("", report)
    return "\n".join(lines) + "\n"


def run(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="stacky-volumes",
        description="exact orbifold volumes, plethystic operations, BPS invariants",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="JSON parameter file")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "tsv"), default="json")
    parser.add_argument("--levels", type=int)
    parser.add_argument("--grade", type=int)
    parser.add_argument("--truncation", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--half-l", dest="half_l")
    parser.add_argument("--delta-mode", dest="delta_mode", choices=("differences", "orbits"))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    threads = os.environ.get("STACKY_THREADS")
    if threads is not None and (not threads.isdigit() or int(threads) < 1):
        _emit({"error": {"kind": "SchemaViolation",
                         "message": "STACKY_THREADS must be a positive integer"}},
              args, force_json=True)
        return 2

    params = {}
    if args.input:
        try:
            with open(args.input) as handle:
                params = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            _emit({"error": {"kind": "SchemaViolation", "message": str(exc)}}, args,
                  force_json=True)
            return 2
        if not isinstance(params, dict):
            _emit({"error": {"kind": "SchemaViolation",
                             "message": "parameter file must hold a JSON object"}},
                  args, force_json=True)
            return 2
    for key in ("levels", "grade", "truncation", "q", "half_l", "delta_mode"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val

    try:
        report = _HANDLERS[args.command](params)
    except SchemaViolation as exc:
        _emit({"error": {"kind": "SchemaViolation", "message": str(exc)}}, args,
              force_json=True)
        return 2
    except _MODULE_ERROR_CLASSES as exc:
        origin = next(name for cls, name in _MODULE_ERRORS if isinstance(exc, cls))
        _emit({"error": {"kind": type(exc).__name__, "module": origin,
                         "message": str(exc)}}, args, force_json=True)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        _emit({"error": {"kind": type(exc).__name__, "message": str(exc)}}, args,
              force_json=True)
        return 1
    _emit(report, args)
    return 0


def _emit(report, args, force_json=False):
    if args.format == "tsv" and not force_json:
        text = _tsv(report)
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
