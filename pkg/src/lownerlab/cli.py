"""Command-line surface.

Subcommands: eval, vpsi, lowner, john, duality, mvee, limits, ratio,
selftest. Densities come in as JSON documents (see serialize), grids as
"lo:hi:n" axis specs. Exit codes: 0 success, 1 solver infeasibility (a JSON
diagnostic is still emitted), 2 input or schema violation, 3 numerical
failure. The solver knobs --seed, --tol-feas, --tol-obj, --budget fall back
to the LOWNERLAB_SEED, LOWNERLAB_TOL_FEAS, LOWNERLAB_TOL_OBJ,
LOWNERLAB_BUDGET environment variables before their built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from .core import INF
from .errors import InfeasibleError, NumericalError, SchemaError
from .integrals import unit_ball_volume, v_psi, v_psi_s_closed
from .john_solver import even_duality_check, solve_john_s
from .limits import gaussian_limit, s_curve, zero_limit_check
from .lowner_solver import SolverOptions, solve_lowner_s
from .mvee import john_decomposition, mvee_centered
from .psi_family import profile_of
from .ratio import ratio_corpus_report
from .selftest import run_selftest
from .serialize import (curve_csv, density_from_json, dumps, ratio_report_csv,
                        report_to_json)

__all__ = ["main"]


def _env(name: str, cast, default):
    raw = os.environ.get(f"LOWNERLAB_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SchemaError(f"LOWNERLAB_{name}: bad value {raw!r}") from None


def _parse_s(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity"):
        return INF
    try:
        s = float(t)
    except ValueError:
        raise SchemaError(f"bad s value {text!r}") from None
    if math.isnan(s) or s < 0:
        raise SchemaError(f"s must lie in [0, inf], got {text!r}")
    return s


def _parse_s_list(text: str) -> list[float]:
    return [_parse_s(tok) for tok in text.split(",") if tok.strip()]


def _parse_d_list(text: str) -> list[int]:
    out: list[int] = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            a, b = tok.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    if not out or any(d < 1 for d in out):
        raise SchemaError(f"bad dimension list {text!r}")
    return out


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from None


def _load_density(path: str):
    return density_from_json(_load_json(path))


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _options(args) -> SolverOptions:
    return SolverOptions(feasibility_tol=args.tol_feas,
                         objective_tol=args.tol_obj,
                         seed=args.seed,
                         oracle_budget=args.budget)


def _grid_points(spec: str, d: int) -> np.ndarray:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise SchemaError(f"grid spec must be lo:hi:n, got {spec!r}") from None
    if not (hi > lo and n >= 2):
        raise SchemaError(f"degenerate grid spec {spec!r}")
    if n ** d > 200000:
        raise SchemaError(f"grid of {n}^{d} points is too large")
    axis = np.linspace(lo, hi, n)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_eval(args) -> int:
    f = _load_density(args.f)
    if args.points:
        pts = np.atleast_2d(np.asarray(_load_json(args.points), dtype=float))
        if pts.shape[1] != f.dimension:
            raise SchemaError("points dimension does not match the density")
    else:
        if not args.grid:
            raise SchemaError("eval needs --grid or --points")
        pts = _grid_points(args.grid, f.dimension)
    vals = np.asarray(f.value(pts), dtype=float).reshape(-1)
    head = [f"x_{i + 1}" for i in range(f.dimension)] + ["value"]
    lines = [",".join(head)]
    for x, v in zip(pts, vals):
        lines.append(",".join([repr(float(c)) for c in x] + [repr(float(v))]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_vpsi(args) -> int:
    lines = ["s,d,v_quad,v_closed,rel_gap"]
    for s in _parse_s_list(args.s):
        for d in _parse_d_list(args.d):
            quad = v_psi(profile_of(s), d)
            if s == 0:
                closed = math.factorial(d) * unit_ball_volume(d)
            elif math.isinf(s):
                closed = math.pi ** (d / 2.0)
            else:
                closed = v_psi_s_closed(s, d)
            gap = abs(quad - closed) / max(abs(closed), 1e-300)
            s_txt = "inf" if math.isinf(s) else repr(float(s))
            lines.append(",".join([s_txt, str(d), repr(quad), repr(closed),
                                   repr(gap)]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_lowner(args) -> int:
    rep = solve_lowner_s(_load_density(args.f), _parse_s(args.s),
                         _options(args))
    _emit(dumps(report_to_json(rep), indent=2), args.out)
    return 0


def _cmd_john(args) -> int:
    rep = solve_john_s(_load_density(args.f), _parse_s(args.s),
                       _options(args))
    _emit(dumps(report_to_json(rep), indent=2), args.out)
    return 0


def _cmd_duality(args) -> int:
    res1, res2 = even_duality_check(_load_density(args.f), _parse_s(args.s),
                                    opts=_options(args))
    _emit(dumps({"polar_of_inscribed_vs_covering": res1,
                 "polar_of_covering_vs_inscribed": res2}, indent=2), args.out)
    return 0


def _cmd_mvee(args) -> int:
    pts = np.atleast_2d(np.asarray(_load_json(args.points), dtype=float))
    m = mvee_centered(pts, tol=args.tol)
    u, c = john_decomposition(pts, m)
    d = pts.shape[1]
    resid = np.eye(d) - sum(ci * np.outer(ui, ui) for ci, ui in zip(c, u))
    _emit(dumps({"M": m.tolist(),
                 "contacts": [ui.tolist() for ui in u],
                 "coefficients": c.tolist(),
                 "coefficient_sum": float(c.sum()),
                 "identity_residual": float(np.linalg.norm(resid))},
                indent=2), args.out)
    return 0


def _cmd_limits(args) -> int:
    f = _load_density(args.f)
    opts = _options(args)
    if args.mode == "curve":
        if not args.s_grid:
            raise SchemaError("curve mode needs --s-grid")
        curve = s_curve(f, _parse_s_list(args.s_grid), opts)
        _emit(curve_csv(curve), args.out)
        return 0
    if args.mode == "zero":
        param, sup = zero_limit_check(f, args.small_s, opts=opts)
        _emit(dumps({"param_distance": param, "sup_distance": sup},
                    indent=2), args.out)
        return 0
    e = gaussian_limit(f, opts)
    _emit(dumps({"A": e.matrix.tolist(), "alpha": e.height,
                 "a": e.center.tolist()}, indent=2), args.out)
    return 0


def _ratio_worker(payload):
    idx, doc, s_list, opt_fields = payload
    f = density_from_json(doc)
    report = ratio_corpus_report([f], s_list, SolverOptions(**opt_fields))
    for row in report["rows"]:
        row["index"] = idx
    return report["rows"]


def _cmd_ratio(args) -> int:
    docs = _load_json(args.corpus)
    if not isinstance(docs, list) or not docs:
        raise SchemaError("corpus must be a non-empty JSON array")
    s_list = _parse_s_list(args.s)
    opts = _options(args)
    if args.jobs > 1:
        fields = {"feasibility_tol": opts.feasibility_tol,
                  "objective_tol": opts.objective_tol,
                  "seed": opts.seed, "oracle_budget": opts.oracle_budget}
        rows = []
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            payloads = [(i, doc, s_list, fields) for i, doc in enumerate(docs)]
            for chunk in pool.map(_ratio_worker, payloads):
                rows.extend(chunk)
        rows.sort(key=lambda r: (r["index"], r["s"]))
        summary = []
        for d in sorted({r["d"] for r in rows}):
            for s in sorted({r["s"] for r in rows}):
                vals = [r["ratio"] for r in rows
                        if r["d"] == d and r["s"] == s
                        and math.isfinite(r["ratio"])]
                if vals:
                    summary.append({"d": d, "s": s, "max_ratio": max(vals)})
        report = {"rows": rows, "summary": summary,
                  "zero_order_bound_ok": all(r["ok"] for r in rows
                                             if r["s"] == 0.0)}
    else:
        corpus = [density_from_json(doc) for doc in docs]
        report = ratio_corpus_report(corpus, s_list, opts)
    if args.format == "csv":
        _emit(ratio_report_csv(report), args.out)
    else:
        _emit(dumps(report, indent=2), args.out)
    return 0


def _cmd_selftest(args) -> int:
    res = run_selftest(verbose=not args.quiet)
    if args.out not in (None, "-"):
        _emit(dumps(res, indent=2), args.out)
    return 0 if res["ok"] else 1


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="lownerlab",
        description="Covering and inscribed profile optimization over "
                    "log-concave densities.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, solver=True):
        p.add_argument("--out", "-o", default="-",
                       help="output path ('-' for stdout)")
        if solver:
            p.add_argument("--seed", type=int,
                           default=_env("SEED", int, 0))
            p.add_argument("--tol-feas", type=float,
                           default=_env("TOL_FEAS", float, 1e-8))
            p.add_argument("--tol-obj", type=float,
                           default=_env("TOL_OBJ", float, 1e-9))
            p.add_argument("--budget", type=int,
                           default=_env("BUDGET", int, 4000))

    p = sub.add_parser("eval", help="evaluate a density on a grid")
    p.add_argument("--f", required=True, help="density JSON path")
    p.add_argument("--grid", help="axis spec lo:hi:n (tensor grid)")
    p.add_argument("--points", help="JSON array of points")
    common(p, solver=False)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("vpsi", help="volume-constant table over (s, d)")
    p.add_argument("--s", required=True, help="comma list, inf allowed")
    p.add_argument("--d", required=True, help="comma list or a..b range")
    common(p, solver=False)
    p.set_defaults(fn=_cmd_vpsi)

    p = sub.add_parser("lowner", help="minimal covering solve")
    p.add_argument("--f", required=True)
    p.add_argument("--s", required=True)
    common(p)
    p.set_defaults(fn=_cmd_lowner)

    p = sub.add_parser("john", help="maximal inscribed solve")
    p.add_argument("--f", required=True)
    p.add_argument("--s", required=True)
    common(p)
    p.set_defaults(fn=_cmd_john)

    p = sub.add_parser("duality", help="even-function conjugation residuals")
    p.add_argument("--f", required=True)
    p.add_argument("--s", required=True)
    common(p)
    p.set_defaults(fn=_cmd_duality)

    p = sub.add_parser("mvee", help="centered enclosing ellipsoid + contacts")
    p.add_argument("--points", required=True, help="JSON array of points")
    p.add_argument("--tol", type=float, default=1e-9)
    common(p, solver=False)
    p.set_defaults(fn=_cmd_mvee)

    p = sub.add_parser("limits", help="s-curve, zero-limit, gaussian-limit")
    p.add_argument("--f", required=True)
    p.add_argument("--mode", choices=("curve", "zero", "gaussian"),
                   default="curve")
    p.add_argument("--s-grid", help="comma list for curve mode")
    p.add_argument("--small-s", type=float, default=1e-3)
    common(p)
    p.set_defaults(fn=_cmd_limits)

    p = sub.add_parser("ratio", help="outer-integral-ratio corpus report")
    p.add_argument("--corpus", required=True, help="JSON array of densities")
    p.add_argument("--s", required=True, help="comma list of orders")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(fn=_cmd_ratio)

    p = sub.add_parser("selftest", help="run every module property suite")
    p.add_argument("--quiet", action="store_true")
    common(p, solver=False)
    p.set_defaults(fn=_cmd_selftest)

    return top


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.fn(args)
    except InfeasibleError as exc:
        diag = {"error": "infeasible", "message": str(exc)}
        if getattr(exc, "witness", None) is not None:
            diag["witness"] = np.asarray(exc.witness, dtype=float).tolist()
        sys.stdout.write(dumps(diag, indent=2) + "\n")
        return 1
    except SchemaError as exc:
        sys.stderr.write(dumps({"error": "schema", "message": str(exc)})
                         + "\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(dumps({"error": "numerical", "message": str(exc)})
                         + "\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
