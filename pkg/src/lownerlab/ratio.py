"""Outer integral ratio: how much mass the optimal covering adds.

ovr_s(f) = (integral of the s-covering optimum / integral of f)^(1/d). The
ratio is scale and translation invariant and at least 1. At s = 0 it is
bounded by

    e sqrt(pi) (d! / Gamma(1 + d/2))^(1/d),

which is 2e at d = 1 and e sqrt(2 pi) at d = 2. For s > 0 a numeric bound
follows from the integral comparison between profile classes:
ovr_s <= (V_s / V_0)^(1/d) * ovr-bound(0), with V_s the profile volume
constant.

density_integral evaluates the denominator: closed forms for the structured
kinds, adaptive quadrature over a tail-safe box for everything else (d <= 3).
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.spatial import ConvexHull

from .core import (EllipsoidalDensity, GaugePowerDensity, GaussianDensity,
                   HeightDensity, LogDensity, ray_level_radius,
                   sphere_directions)
from .errors import InfeasibleError, NumericalError, SchemaError
from .integrals import v_psi, w_s
from .lowner_solver import SolverOptions, solve_lowner_s
from .psi_family import profile_of

__all__ = [
    "density_integral",
    "outer_integral_ratio",
    "ratio_bound",
    "ratio_bound_s",
    "ratio_corpus_report",
]


def _hull_volume(vertices: np.ndarray) -> float:
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    if v.shape[1] == 1:
        return float(v.max() - v.min())
    return float(ConvexHull(v).volume)


def _tail_box(f: LogDensity) -> tuple[np.ndarray, np.ndarray]:
    """Axis box around the mode containing all mass above e^-40 relative."""
    d = f.dimension
    mode = np.asarray(f.mode, dtype=float)
    if f.support_bounded():
        r = f.support_radius() * (1.0 + 1e-9)
        return mode - r, mode + r
    level = float(np.asarray(f.phi(mode))) + 40.0
    dirs = sphere_directions(d, n_extra=32, seed=3,
                             matrices=f.structure_matrices())
    for c in f.centers():
        dv = np.asarray(c, dtype=float) - mode
        n = float(np.linalg.norm(dv))
        if n > 1e-12:
            dirs.append(dv / n)
    r = max(ray_level_radius(f, mode, w, level)
            for u in dirs for w in (u, -u))
    if r >= 1e9:
        raise NumericalError("density tail too heavy to box for quadrature")
    return mode - r, mode + r


def _cubature(f: LogDensity, rel_tol: float) -> float:
    d = f.dimension
    lo, hi = _tail_box(f)
    if d == 1:
        kinks = sorted({float(np.asarray(c).reshape(-1)[0])
                        for c in f.centers()
                        if lo[0] < float(np.asarray(c).reshape(-1)[0]) < hi[0]})
        val, _ = integrate.quad(lambda t: f.value(np.array([t])),
                                lo[0], hi[0], points=kinks or None,
                                limit=300, epsabs=0.0, epsrel=rel_tol)
        return float(val)
    if d == 2:
        val, _ = integrate.dblquad(
            lambda y, x: f.value(np.array([x, y])),
            lo[0], hi[0], lo[1], hi[1],
            epsabs=0.0, epsrel=max(rel_tol, 1e-9))
        return float(val)
    if d == 3:
        val, _ = integrate.nquad(
            lambda x, y, z: f.value(np.array([x, y, z])),
            [(lo[0], hi[0]), (lo[1], hi[1]), (lo[2], hi[2])],
            opts={"epsabs": 0.0, "epsrel": max(rel_tol, 1e-6), "limit": 80})
        return float(val)
    raise SchemaError(f"cubature supports d <= 3, got d = {d}")


def density_integral(f: LogDensity, rel_tol: float = 1e-10) -> float:
    """Integral of f over R^d: closed form when the kind admits one,
    adaptive quadrature otherwise."""
    d = f.dimension
    if isinstance(f, EllipsoidalDensity):
        return f.e.height * v_psi(f.profile, d) / f.e.det()
    if isinstance(f, GaussianDensity):
        return f.e.height * math.pi ** (d / 2.0) / f.e.det()
    if isinstance(f, HeightDensity):
        return f.e.det() / f.e.height * w_s(f.s, d)
    if isinstance(f, GaugePowerDensity):
        return (f.height * math.exp(math.lgamma(1.0 + d / f.p))
                * _hull_volume(f.vertices))
    return _cubature(f, rel_tol)


def outer_integral_ratio(f: LogDensity, s: float,
                         opts: Optional[SolverOptions] = None,
                         f_integral: Optional[float] = None) -> float:
    """(covering integral / integral of f)^(1/d) at the given s."""
    rep = solve_lowner_s(f, s, opts or SolverOptions())
    denom = density_integral(f) if f_integral is None else float(f_integral)
    if not denom > 0:
        raise NumericalError(f"nonpositive density integral {denom}")
    return (rep.integral / denom) ** (1.0 / f.dimension)


def ratio_bound(d: int) -> float:
    """Dimensional bound on the ratio at s = 0."""
    if d < 1:
        raise SchemaError("dimension must be at least 1")
    return math.exp(1.0 + 0.5 * math.log(math.pi)
                    + (math.lgamma(d + 1.0) - math.lgamma(1.0 + d / 2.0)) / d)


def ratio_bound_s(s: float, d: int) -> float:
    """Numeric bound at order s, via the volume-constant comparison with
    the s = 0 bound."""
    b0 = ratio_bound(d)
    if s == 0:
        return b0
    if math.isinf(s):
        vs = math.pi ** (d / 2.0)
    else:
        vs = v_psi(profile_of(s), d)
    v0 = v_psi(profile_of(0.0), d)
    return (vs / v0) ** (1.0 / d) * b0


def ratio_corpus_report(corpus: Sequence[LogDensity],
                        s_list: Sequence[float],
                        opts: Optional[SolverOptions] = None) -> dict:
    """Ratios for every (instance, s) pair, with per-instance flags, the
    max observed ratio per (d, s), and the s = 0 bound verdict."""
    opts = opts or SolverOptions()
    rows = []
    for i, f in enumerate(corpus):
        d = f.dimension
        try:
            fint = density_integral(f)
        except (NumericalError, SchemaError) as exc:
            for s in s_list:
                rows.append({"index": i, "kind": f.kind, "d": d,
                             "s": float(s), "ratio": math.nan,
                             "bound": ratio_bound_s(float(s), d), "ok": False,
                             "error": f"integral: {exc}"})
            continue
        for s in s_list:
            s = float(s)
            bound = ratio_bound_s(s, d)
            try:
                r = outer_integral_ratio(f, s, opts, f_integral=fint)
            except (InfeasibleError, NumericalError) as exc:
                rows.append({"index": i, "kind": f.kind, "d": d, "s": s,
                             "ratio": math.nan, "bound": bound, "ok": False,
                             "error": str(exc)})
                continue
            rows.append({"index": i, "kind": f.kind, "d": d, "s": s,
                         "ratio": r, "bound": bound,
                         "ok": bool(r <= bound * (1.0 + 1e-9))})
    summary = []
    for d in sorted({row["d"] for row in rows}):
        for s in sorted({row["s"] for row in rows}):
            vals = [row["ratio"] for row in rows
                    if row["d"] == d and row["s"] == s
                    and math.isfinite(row["ratio"])]
            if vals:
                summary.append({"d": d, "s": s, "max_ratio": max(vals)})
    zero_ok = all(row["ok"] for row in rows if row["s"] == 0.0)
    return {"rows": rows, "summary": summary, "zero_order_bound_ok": zero_ok}
