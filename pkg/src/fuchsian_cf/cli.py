"""Command-line front end.

Example:
  fuchsian-cf singular --op gauss.json
  fuchsian-cf logderiv --op gauss.json --z 0.2 --tol 1e-10 --n-max 2000
  fuchsian-cf hypergeom-check --a 1/2 --b 1/3 --c 1/4 --z 4/5

Exit codes: 0 ok, 2 bad input, 3 refused precondition, 4 no convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .continued_fraction import (
    convergents,
    evaluate,
    from_order2_coefficients,
    branched_fraction_eval,
    perron_coefficients,
)
from .derivative_chain import chain_states, logderiv_limit, verify_chain
from .errors import NonConvergenceError, OperatorError, PreconditionError
from .geometry import bisector_lines, classify_point
from .hypergeometric import HypergeomParams, region_dichotomy_check
from .jsonio import (
    OperatorFileError,
    RunConfig,
    load_operator,
    load_schema,
    parse_scalar_text,
    scalar_to_json,
    schema_names,
    validate,
)
from .operator_core import indicial_data, is_fuchsian, singular_points
from .roots import RootFindingError
from .scalars import Backend
from .series_recurrence import EventuallyZeroError, ratio_limit, solve_series

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NONCONVERGENCE = 0, 2, 3, 4


class _Fail(Exception):
    def __init__(self, code, reason, message, **extra):
        super().__init__(message)
        self.code, self.reason, self.extra = code, reason, extra


def _real(x):
    return None if x is None or not math.isfinite(x) else float(x)


# ---------------------------------------------------------------------------
# helpers


def _backend(args) -> Backend | None:
    if args.backend is None:
        return None
    return Backend(args.backend, args.precision_bits)


def _work_backend(args) -> Backend:
    return _backend(args) or Backend("exact")


def _operator(args):
    return load_operator(args.op, _backend(args))


def _point(text, args, op=None):
    be = op.backend if op is not None and args.backend is None else _work_backend(args)
    try:
        return parse_scalar_text(text, be)
    except (ValueError, OperatorError) as exc:
        raise _Fail(EXIT_INPUT, "bad_argument", str(exc)) from exc


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _genericity_json(v):
    return {"status": v.status, "explanation": v.explanation, "holomorphic_dimension": v.holomorphic_dimension}


# ---------------------------------------------------------------------------
# subcommands; each returns (report dict, csv text or None)


def cmd_singular(args, config):
    op = _operator(args)
    S = singular_points(op)
    fr = is_fuchsian(op)
    local = []
    for t in S:
        rep = indicial_data(op, t)
        local.append({
            "point": scalar_to_json(t),
            "exponents": [scalar_to_json(e) for e in rep.exponents],
            "fuchsian": rep.fuchsian_at_point,
            "genericity": _genericity_json(rep.generic_probe),
        })
    report = {
        "points": [scalar_to_json(t) for t in S],
        "fuchsian": fr.fuchsian,
        "infinity_regular": fr.infinity_regular,
        "local": local,
    }
    rows = [(json.dumps(r["point"]), json.dumps(r["exponents"]), r["fuchsian"], r["genericity"]["status"]) for r in local]
    return report, _csv(rows, ["point", "exponents", "fuchsian", "genericity"])


def _grid(text):
    try:
        re0, re1, im0, im1, nx, ny = text.split(",")
        re0, re1, im0, im1 = float(re0), float(re1), float(im0), float(im1)
        nx, ny = int(nx), int(ny)
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, "bad_argument", "grid is re0,re1,im0,im1,nx,ny") from exc
    if nx < 1 or ny < 1:
        raise _Fail(EXIT_INPUT, "bad_argument", "grid needs at least one point per axis")
    xs = [re0 + (re1 - re0) * i / max(nx - 1, 1) for i in range(nx)]
    ys = [im0 + (im1 - im0) * j / max(ny - 1, 1) for j in range(ny)]
    return [complex(x, y) for y in ys for x in xs]


def cmd_regions(args, config):
    op = _operator(args)
    S = list(singular_points(op))
    lines = [
        {"midpoint": scalar_to_json(l.midpoint), "direction": scalar_to_json(l.direction), "pair": list(l.site_pair)}
        for l in bisector_lines(S)
    ]
    cells, rows = [], []
    if args.grid:
        pts = _grid(args.grid)

        def one(z):
            try:
                r = classify_point(S, z, args.tol)
                return {"z": scalar_to_json(z), "nearest": r.nearest_index, "is_tie": r.is_tie,
                        "distance_to_bisectors": _real(r.distance_to_bisectors)}
            except PreconditionError:
                return {"z": scalar_to_json(z), "nearest": None, "is_tie": False, "distance_to_bisectors": None,
                        "at_singularity": True}

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            cells = list(pool.map(one, pts))  # map keeps input order
        for z, c in zip(pts, cells):
            rows.append((z.real, z.imag, "" if c["nearest"] is None else c["nearest"], c["is_tie"],
                         "" if c["distance_to_bisectors"] is None else c["distance_to_bisectors"]))
    report = {"points": [scalar_to_json(t) for t in S], "lines": lines, "cells": cells}
    return report, _csv(rows, ["re", "im", "nearest", "is_tie", "distance_to_bisectors"])


def _initial(values, args, op):
    if len(values) != op.order:
        raise _Fail(EXIT_INPUT, "bad_argument", f"need {op.order} --initial values, got {len(values)}")
    return [_point(v, args, op) for v in values]


def cmd_series_ratio(args, config):
    op = _operator(args)
    z0 = _point(args.z0, args, op)
    init = _initial(args.initial or ["1"] + ["0"] * (op.order - 1), args, op)
    series = solve_series(op, z0, init, args.N, backend=_backend(args))
    est = ratio_limit(series, acceleration=args.acceleration, order=args.richardson_order,
                      window=args.window, tol=args.tol)
    matched = None if est.matched_singularity is None else series.singularities[est.matched_singularity]
    report = {
        "limit": scalar_to_json(est.limit),
        "radius": _real(est.radius),
        "matched_singularity": None if matched is None else scalar_to_json(matched),
        "accelerated": est.accelerated,
        "history": [{"n": n, "ratio": scalar_to_json(r)} for n, r in est.history],
    }
    rows = [(n, complex(r).real, complex(r).imag) for n, r in est.history]
    return report, _csv(rows, ["n", "ratio_re", "ratio_im"])


def cmd_logderiv(args, config):
    op = _operator(args)
    z = _point(args.z, args, op)
    res = logderiv_limit(op, z, tol=args.tol, n_max=args.n_max, mode=args.mode,
                         override_genericity=args.override_genericity, backend=_backend(args))
    report = {
        "value": scalar_to_json(complex(res.value)) if not args.exact_value else scalar_to_json(res.value),
        "n_used": res.n_used,
        "cauchy_gap": res.cauchy_gap,
        "mode": res.mode,
        "skipped": list(res.skipped),
        "nearest_singularity": scalar_to_json(res.nearest_singularity),
        "genericity": res.genericity,
        "history": [{"n": n, "value": scalar_to_json(complex(v))} for n, v in res.history],
    }
    rows = [(n, complex(v).real, complex(v).imag) for n, v in res.history]
    return report, _csv(rows, ["n", "value_re", "value_im"])


def cmd_cf(args, config):
    op = _operator(args)
    z = _point(args.z, args, op)
    k, coef = perron_coefficients(op, z, _backend(args))
    if k > 2:
        depth = args.depth or 400
        val = branched_fraction_eval(coef, k, depth)
        report = {"method": "branched", "terms": k, "value": scalar_to_json(complex(val)), "n": depth,
                  "converged": None, "diagnostics": ["no convergence theory for more than three terms; value reported"]}
        return report, _csv([(depth, complex(val).real, complex(val).imag)], ["n", "value_re", "value_im"])
    if k < 2:
        raise _Fail(EXIT_PRECONDITION, "not_three_term", f"derivative recurrence has {k} terms")
    cf = from_order2_coefficients(lambda n: coef(1, n), lambda n: coef(2, n), args.depth)
    if args.emit_convergents:
        pairs = convergents(cf, args.depth or args.n_max)
        with open(args.emit_convergents, "w", encoding="utf-8", newline="") as fh:
            fh.write(_csv([(p.n, json.dumps(scalar_to_json(p.A)), json.dumps(scalar_to_json(p.B))) for p in pairs],
                          ["n", "A", "B"]))
    ev = evaluate(cf, tol=args.tol, N_max=args.n_max)
    report = {"method": "three_term", "terms": k, "value": scalar_to_json(complex(ev.value)), "n": ev.n,
              "converged": ev.converged, "diagnostics": list(ev.diagnostics)}
    rows = [(n, complex(v).real, complex(v).imag) for n, v in ev.history]
    return report, _csv(rows, ["n", "value_re", "value_im"])


def cmd_hypergeom_check(args, config):
    be = Backend("exact") if (args.backend or "exact") == "exact" else _work_backend(args)
    try:
        params = HypergeomParams(*(parse_scalar_text(v, be) for v in (args.a, args.b, args.c)))
    except (ValueError, OperatorError) as exc:
        raise _Fail(EXIT_INPUT, "bad_argument", str(exc)) from exc
    z = parse_scalar_text(args.z, be)
    rep = region_dichotomy_check(params, z, tol=args.tol, N_max=args.n_max)
    report = {
        "z": scalar_to_json(rep.z),
        "side": rep.side,
        "cf_value": None if rep.cf_value is None else scalar_to_json(rep.cf_value),
        "cf_terms": rep.cf_terms,
        "converged": rep.converged,
        "oracle_value": None if rep.oracle_value is None else scalar_to_json(rep.oracle_value),
        "error": rep.error,
        "distance_to_bisectors": rep.distance_to_bisectors,
        "diagnostics": list(rep.diagnostics),
    }
    rows = [(report["side"], rep.error, rep.cf_terms, rep.converged)]
    return report, _csv(rows, ["side", "error", "cf_terms", "converged"])


def cmd_chain_verify(args, config):
    op = _operator(args)
    z = _point(args.z, args, op)
    init = _initial(args.initial or ["1"] + ["0"] * (op.order - 1), args, op)
    series = solve_series(op, z, init, args.n_max + 1, backend=_backend(args), with_singularities=False)
    rows = []
    scale = max(abs(complex(c)) for c in series.coefficients) or 1.0
    for st in chain_states(op, args.n_max):
        if st.n < op.order:
            continue
        r = verify_chain(op, series, z, st.n, st)
        rows.append({"n": st.n, "residual": scalar_to_json(r), "abs": abs(complex(r)),
                     "exact_zero": bool(r == 0)})
    report = {"z": scalar_to_json(z), "rows": rows, "max_abs": max((r["abs"] for r in rows), default=0.0),
              "coefficient_scale": scale}
    return report, _csv([(r["n"], r["abs"], r["exact_zero"]) for r in rows], ["n", "abs_residual", "exact_zero"])


COMMANDS = {
    "singular": cmd_singular,
    "regions": cmd_regions,
    "series-ratio": cmd_series_ratio,
    "logderiv": cmd_logderiv,
    "cf": cmd_cf,
    "hypergeom-check": cmd_hypergeom_check,
    "chain-verify": cmd_chain_verify,
}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["exact", "float"], default=None,
                        help="scalar backend (default: the operator file's)")
    common.add_argument("--precision-bits", type=int, default=53, help="float precision in bits (default 53)")
    common.add_argument("--out", choices=["json", "csv"], default="json", help="output format (default json)")

    ap = argparse.ArgumentParser(prog="fuchsian-cf", description="Fuchsian operators and Perron continued fractions")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--schema", nargs="?", const="all", default=None, metavar="NAME",
                    help="print a JSON schema (or all of them) and exit")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("singular", parents=[common], help="singular points, exponents, genericity")
    p.add_argument("--op", required=True, help="operator JSON file")

    p = sub.add_parser("regions", parents=[common], help="bisector lines and cell membership")
    p.add_argument("--op", required=True)
    p.add_argument("--grid", default=None, help="re0,re1,im0,im1,nx,ny")
    p.add_argument("--tol", type=float, default=1e-12, help="tie tolerance (default 1e-12)")
    p.add_argument("--jobs", type=int, default=4, help="worker threads (default 4)")

    p = sub.add_parser("series-ratio", parents=[common], help="Taylor series and ratio limit")
    p.add_argument("--op", required=True)
    p.add_argument("--z0", required=True, help="center, 're' or 're,im'")
    p.add_argument("--initial", action="append", help="f_j = y^(j)(z0)/j!, repeat m times (default 1,0,...)")
    p.add_argument("--N", type=int, default=2000, help="number of coefficients (default 2000)")
    p.add_argument("--window", type=int, default=10, help="agreement window (default 10)")
    p.add_argument("--tol", type=float, default=1e-6, help="relative agreement (default 1e-6)")
    p.add_argument("--acceleration", choices=["none", "richardson"], default="richardson")
    p.add_argument("--richardson-order", type=int, default=1)

    p = sub.add_parser("logderiv", parents=[common], help="limit of -q_0,n/q_1,n")
    p.add_argument("--op", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--tol", type=float, default=1e-10, help="stopping gap (default 1e-10)")
    p.add_argument("--n-max", type=int, default=2000, help="iteration cap (default 2000)")
    p.add_argument("--mode", choices=["auto", "symbolic", "values"], default="auto")
    p.add_argument("--override-genericity", action="store_true")
    p.add_argument("--exact-value", action="store_true", help="emit the exact value when available")

    p = sub.add_parser("cf", parents=[common], help="continued fraction of the derivative recurrence")
    p.add_argument("--op", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--depth", type=int, default=None, help="truncation depth (default: until convergence)")
    p.add_argument("--tol", type=float, default=1e-12, help="stopping gap (default 1e-12)")
    p.add_argument("--n-max", type=int, default=10000, help="term cap (default 10000)")
    p.add_argument("--emit-convergents", default=None, metavar="CSV", help="write (n, A_n, B_n) to this file")

    p = sub.add_parser("hypergeom-check", parents=[common], help="Gauss fraction against the 2F1 oracle")
    for name in ("a", "b", "c"):
        p.add_argument(f"--{name}", required=True, help="p/q or re,im")
    p.add_argument("--z", required=True)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--n-max", type=int, default=300)

    p = sub.add_parser("chain-verify", parents=[common], help="residuals of y^(n) = sum q_i,n y^(i)")
    p.add_argument("--op", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--initial", action="append")
    p.add_argument("--n-max", type=int, default=10)
    return ap


def _config(args) -> RunConfig:
    known = {"command", "op", "z", "z0", "grid", "tol", "n_max", "depth", "backend", "precision_bits", "out", "schema"}
    extra = {k: v for k, v in sorted(vars(args).items()) if k not in known}
    return RunConfig(
        subcommand=args.command,
        op_path=getattr(args, "op", None),
        z=getattr(args, "z", None) or getattr(args, "z0", None),
        grid=getattr(args, "grid", None),
        tol=getattr(args, "tol", None),
        n_max=getattr(args, "n_max", None),
        depth=getattr(args, "depth", None),
        backend=args.backend or "exact",
        precision_bits=args.precision_bits,
        out=args.out,
        extra=extra,
    )


def _emit(doc, out):
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.schema is not None:
        names = schema_names()
        if args.schema == "all":
            _emit({n: load_schema(n) for n in names}, out)
            return EXIT_OK
        if args.schema not in names:
            _emit({"status": "error", "reason": "unknown_schema", "message": f"known: {', '.join(names)}"}, out)
            return EXIT_INPUT
        _emit(load_schema(args.schema), out)
        return EXIT_OK
    if args.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_INPUT
    config = _config(args)
    try:
        try:
            report, table = COMMANDS[args.command](args, config)
        except OperatorFileError as exc:
            raise _Fail(EXIT_INPUT, "parse_error", str(exc), line=exc.line, column=exc.column) from exc
        except OperatorError as exc:
            raise _Fail(EXIT_INPUT, "invalid_operator", str(exc)) from exc
        except PreconditionError as exc:
            raise _Fail(EXIT_PRECONDITION, exc.reason, str(exc)) from exc
        except EventuallyZeroError as exc:
            raise _Fail(EXIT_NONCONVERGENCE, "eventually_zero", str(exc)) from exc
        except (NonConvergenceError, RootFindingError) as exc:
            raise _Fail(EXIT_NONCONVERGENCE, "non_convergence", str(exc)) from exc
        except ZeroDivisionError as exc:
            raise _Fail(EXIT_PRECONDITION, "zero_division", str(exc)) from exc
    except _Fail as f:
        doc = {"status": "error", "command": args.command, "reason": f.reason, "message": str(f)}
        doc.update({k: v for k, v in f.extra.items() if v is not None})
        validate(doc, "error")
        _emit(doc, out)
        return f.code
    report = {"status": "ok", "command": args.command, "config": config.to_json(), **report}
    validate(report, args.command)
    if args.out == "csv":
        out.write(table)
    else:
        _emit(report, out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
