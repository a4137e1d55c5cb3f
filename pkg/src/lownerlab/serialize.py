"""JSON schema and CSV emission.

Density JSON is `{"kind": ..., "dim": d, ...}` with variants:

    ellipsoidal  {"s", "A", "alpha", "a"}   alpha e^{-psi_s(|A(x-a)|)}
    gaussian     {"A", "alpha", "a"}        alpha e^{-|A(x-a)|^2}
    gauge_power  {"vertices", "p", "alpha"} alpha e^{-||x||_K^p}
    min_of       {"parts": [...]}           pointwise min of the parts
    height       {"s", "A", "alpha", "a"}   (1/alpha)(1-|A^{-1}(x-a)|^2)^{s/2}
    cover        {"parts": [...]}           pointwise max of the parts

Matrices are row-major nested arrays; s = infinity is the string "inf".
Non-finite report fields are encoded as the strings "inf", "-inf", "nan" so
every emitted document parses back to an equal object.
"""
from __future__ import annotations

import io
import json
import math
from typing import Union

import numpy as np

from .core import (CoverDensity, DEllipsoid, EllipsoidalDensity,
                   GaugePowerDensity, GaussianDensity, HeightDensity,
                   LogDensity, MinOfDensity, SolveReport)
from .errors import SchemaError
from .limits import SCurve
from .psi_family import profile_of

__all__ = [
    "density_to_json",
    "density_from_json",
    "report_to_json",
    "report_from_json",
    "curve_csv",
    "ratio_report_csv",
    "jsonable",
    "dumps",
    "loads_density",
]


def _f2j(x: float) -> Union[float, str]:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _j2f(v, what: str) -> float:
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            raise SchemaError(f"{what}: bad float literal {v!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{what}: expected a number, got {type(v).__name__}")
    return float(v)


def jsonable(obj):
    """Recursive copy with numpy scalars/arrays unwrapped and non-finite
    floats string-encoded."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _f2j(float(obj))
    return obj


def dumps(obj, **kw) -> str:
    return json.dumps(jsonable(obj), **kw)


def _s_to_json(s: float) -> Union[float, str]:
    return "inf" if math.isinf(s) else float(s)


def _s_from_json(v) -> float:
    s = _j2f(v, "s")
    if math.isnan(s) or s < 0:
        raise SchemaError(f"s must be in [0, inf], got {v!r}")
    return s


def _matrix(obj, d: int, what: str) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.shape != (d, d):
        raise SchemaError(f"{what}: expected a {d}x{d} row-major matrix")
    return a


def _vector(obj, d: int, what: str) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.shape != (d,):
        raise SchemaError(f"{what}: expected a length-{d} array")
    return a


def _triple(obj: dict, d: int) -> DEllipsoid:
    for key in ("A", "alpha", "a"):
        if key not in obj:
            raise SchemaError(f"missing field {key!r}")
    alpha = _j2f(obj["alpha"], "alpha")
    return DEllipsoid(_matrix(obj["A"], d, "A"), alpha,
                      _vector(obj["a"], d, "a"))


def density_to_json(f: LogDensity) -> dict:
    d = f.dimension
    if isinstance(f, EllipsoidalDensity):
        if f.profile.s is None:
            raise SchemaError("only the psi_s profile family serializes")
        return {"kind": "ellipsoidal", "dim": d, "s": _s_to_json(f.profile.s),
                "A": f.e.matrix.tolist(), "alpha": f.e.height,
                "a": f.e.center.tolist()}
    if isinstance(f, GaussianDensity):
        return {"kind": "gaussian", "dim": d, "A": f.e.matrix.tolist(),
                "alpha": f.e.height, "a": f.e.center.tolist()}
    if isinstance(f, GaugePowerDensity):
        return {"kind": "gauge_power", "dim": d,
                "vertices": f.vertices.tolist(), "p": f.p, "alpha": f.height}
    if isinstance(f, MinOfDensity):
        return {"kind": "min_of", "dim": d,
                "parts": [density_to_json(p) for p in f.parts]}
    if isinstance(f, HeightDensity):
        return {"kind": "height", "dim": d, "s": _s_to_json(f.s),
                "A": f.e.matrix.tolist(), "alpha": f.e.height,
                "a": f.e.center.tolist()}
    if isinstance(f, CoverDensity):
        return {"kind": "cover", "dim": d,
                "parts": [density_to_json(p) for p in f.parts]}
    raise SchemaError(f"kind {f.kind!r} has no JSON form")


def density_from_json(obj) -> LogDensity:
    if not isinstance(obj, dict):
        raise SchemaError("density document must be a JSON object")
    kind = obj.get("kind")
    if "dim" not in obj:
        raise SchemaError("missing field 'dim'")
    d = obj["dim"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise SchemaError(f"dim must be a positive integer, got {d!r}")
    if kind == "ellipsoidal":
        if "s" not in obj:
            raise SchemaError("missing field 's'")
        return EllipsoidalDensity(profile_of(_s_from_json(obj["s"])),
                                  _triple(obj, d))
    if kind == "gaussian":
        return GaussianDensity(_triple(obj, d))
    if kind == "gauge_power":
        for key in ("vertices", "p", "alpha"):
            if key not in obj:
                raise SchemaError(f"missing field {key!r}")
        v = np.asarray(obj["vertices"], dtype=float)
        if v.ndim != 2 or v.shape[1] != d:
            raise SchemaError(f"vertices: expected an m x {d} array")
        return GaugePowerDensity(v, _j2f(obj["p"], "p"),
                                 _j2f(obj["alpha"], "alpha"))
    if kind == "min_of" or kind == "cover":
        parts = obj.get("parts")
        if not isinstance(parts, list) or not parts:
            raise SchemaError("parts must be a non-empty array")
        built = tuple(density_from_json(p) for p in parts)
        if any(p.dimension != d for p in built):
            raise SchemaError("part dimension does not match 'dim'")
        return MinOfDensity(built) if kind == "min_of" else CoverDensity(built)
    if kind == "height":
        if "s" not in obj:
            raise SchemaError("missing field 's'")
        return HeightDensity(_s_from_json(obj["s"]), _triple(obj, d))
    raise SchemaError(f"unknown density kind {kind!r}")


def loads_density(text: str) -> LogDensity:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return density_from_json(obj)


def report_to_json(rep: SolveReport) -> dict:
    e = rep.optimum
    return {"optimum": {"A": e.matrix.tolist(), "alpha": e.height,
                        "a": e.center.tolist()},
            "objective": _f2j(rep.objective),
            "integral": _f2j(rep.integral),
            "max_violation": _f2j(rep.max_violation),
            "iterations": int(rep.iterations),
            "converged": bool(rep.converged),
            "side": rep.side}


def report_from_json(obj) -> SolveReport:
    if not isinstance(obj, dict) or "optimum" not in obj:
        raise SchemaError("report document must be an object with 'optimum'")
    opt = obj["optimum"]
    if not isinstance(opt, dict) or "A" not in opt:
        raise SchemaError("optimum must carry fields A, alpha, a")
    a_mat = np.asarray(opt["A"], dtype=float)
    if a_mat.ndim != 2 or a_mat.shape[0] != a_mat.shape[1]:
        raise SchemaError("optimum.A must be a square matrix")
    d = a_mat.shape[0]
    e = _triple(opt, d)
    return SolveReport(optimum=e,
                       objective=_j2f(obj.get("objective", "nan"), "objective"),
                       integral=_j2f(obj.get("integral", "nan"), "integral"),
                       active_points=(),
                       max_violation=_j2f(obj.get("max_violation", "nan"),
                                          "max_violation"),
                       iterations=int(obj.get("iterations", 0)),
                       converged=bool(obj.get("converged", False)),
                       side=str(obj.get("side", "lowner")))


def _fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return repr(x)


def curve_csv(curve: SCurve) -> str:
    """One row per curve point: s, alpha, center, ascending eigenvalues of A,
    integral."""
    if not curve.reports:
        raise SchemaError("empty curve")
    d = curve.reports[0].optimum.dim
    head = (["s", "alpha"] + [f"a_{i + 1}" for i in range(d)]
            + [f"eig_{i + 1}" for i in range(d)] + ["integral"])
    out = io.StringIO()
    out.write(",".join(head) + "\n")
    for s, rep in zip(curve.s_values, curve.reports):
        e = rep.optimum
        eigs = np.linalg.eigvalsh(e.matrix)
        row = ([_fmt(s), _fmt(e.height)] + [_fmt(c) for c in e.center]
               + [_fmt(v) for v in eigs] + [_fmt(rep.integral)])
        out.write(",".join(row) + "\n")
    return out.getvalue()


def ratio_report_csv(report: dict) -> str:
    out = io.StringIO()
    out.write("index,kind,d,s,ratio,bound,ok\n")
    for row in report["rows"]:
        out.write(",".join([str(row["index"]), row["kind"], str(row["d"]),
                            _fmt(row["s"]), _fmt(row["ratio"]),
                            _fmt(row["bound"]), str(bool(row["ok"])).lower()])
                  + "\n")
    return out.getvalue()
