"""Limit studies along the interpolation parameter.

s_curve sweeps the covering solver over an s grid with warm starts (the
constraint points accumulated at one s seed the next solve). zero_limit_check
quantifies the s -> 0 convergence against the s = 0 solution, both in
parameters and in sup norm on a grid. gaussian_limit runs the s = infinity
solve and cross-checks the curve extrapolation against the algebraic form of
the limit matrix: with lambda the limiting integral and A-hat the
det-normalized limit operator, the limit Gaussian matrix is

    A_L = sqrt(pi) / (lambda det A-hat)^{1/d} * A-hat,

so pi^{d/2} / det A_L = lambda identically.

The two-sided integral comparison between adjacent curve points: for
0 < s1 < s2 finite,

    V(s1)/V(s2) <= I(s1)/I(s2) <= sqrt(((d+s2)/s2)^{s2} ((d+s2)/d)^d) * V(s1)/V(s2),

where V(s) is the profile volume constant and I(s) the optimal covering
integral; the factor comes from the pointwise bound between the two profile
classes at matched parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .core import INF, DEllipsoid, EllipsoidalDensity, LogDensity, SolveReport
from .errors import InfeasibleError, NumericalError, SchemaError
from .integrals import v_psi
from .lowner_solver import SolverOptions, solve_lowner_s
from .psi_family import profile_of

__all__ = [
    "SCurve",
    "s_curve",
    "zero_limit_check",
    "gaussian_limit",
    "comparison_band",
    "adjacent_band_check",
]

_WARM_CAP = 300


@dataclass(frozen=True)
class SCurve:
    """Covering solves along an increasing s grid, plus the extrapolated
    limit Gaussian parameters when the top end converged."""

    s_values: tuple[float, ...]
    reports: tuple[SolveReport, ...]
    limit_gaussian: Optional[DEllipsoid] = None

    def __post_init__(self):
        if len(self.s_values) != len(self.reports):
            raise SchemaError("curve grid and reports differ in length")


def _limit_matrix(report: SolveReport) -> DEllipsoid:
    a_mat = np.asarray(report.optimum.matrix)
    d = a_mat.shape[0]
    det = float(np.linalg.det(a_mat))
    a_hat = a_mat / det ** (1.0 / d)
    lam = report.integral
    a_lim = math.sqrt(math.pi) / lam ** (1.0 / d) * a_hat
    return DEllipsoid(a_lim, report.optimum.height,
                      np.asarray(report.optimum.center))


def _failed_report(d: int, side: str = "lowner") -> SolveReport:
    return SolveReport(optimum=DEllipsoid(np.eye(d), 1.0, np.zeros(d)),
                       objective=math.nan, integral=math.nan,
                       active_points=(), max_violation=INF,
                       iterations=0, converged=False, side=side)


def s_curve(f: LogDensity, s_grid: Sequence[float],
            opts: Optional[SolverOptions] = None) -> SCurve:
    """Covering solves for each s in the grid, warm-starting from the
    accumulated constraint points of earlier solves. Per-point failures
    leave a non-converged placeholder; the curve is still returned."""
    s_list = [float(s) for s in s_grid]
    if any(not s > 0 for s in s_list):
        raise SchemaError("curve grid must be positive")
    if sorted(s_list) != s_list:
        raise SchemaError("curve grid must be increasing")
    opts = opts or SolverOptions()
    reports = []
    warm: list[np.ndarray] = []
    for s in s_list:
        run = opts
        if warm:
            run = replace(opts, initial_points="user",
                          user_points=np.array(warm[-_WARM_CAP:]))
        try:
            rep = solve_lowner_s(f, s, run)
        except (NumericalError, InfeasibleError):
            try:
                rep = solve_lowner_s(f, s, opts)
            except (NumericalError, InfeasibleError):
                rep = _failed_report(f.dimension)
        reports.append(rep)
        for x in rep.active_points:
            warm.append(np.asarray(x, dtype=float))
    limit = None
    if reports and reports[-1].converged:
        limit = _limit_matrix(reports[-1])
    return SCurve(tuple(s_list), tuple(reports), limit)


def zero_limit_check(f: LogDensity, small_s: float, tol: float = 1e-8,
                     opts: Optional[SolverOptions] = None
                     ) -> tuple[float, float]:
    """Distance between the covering at small s and at s = 0: max relative
    parameter deviation, and sup-norm deviation of the two coverings on a
    grid around the s = 0 solution."""
    if not 0 < small_s <= 0.1:
        raise SchemaError("small_s must lie in (0, 0.1]")
    opts = opts or SolverOptions()
    opts = replace(opts, feasibility_tol=min(opts.feasibility_tol, tol))
    rep0 = solve_lowner_s(f, 0.0, opts)
    rep_s = solve_lowner_s(f, small_s, opts)
    e0, es = rep0.optimum, rep_s.optimum
    scale = float(np.linalg.norm(e0.matrix))
    param = max(
        float(np.linalg.norm(np.asarray(es.matrix) - e0.matrix)) / scale,
        abs(es.height - e0.height) / e0.height,
        float(np.linalg.norm(np.asarray(es.center) - e0.center))
        * float(np.linalg.eigvalsh(e0.matrix)[-1]),
    )
    d = f.dimension
    rng = np.random.default_rng(opts.seed + 2)
    u = rng.standard_normal((160, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    radii = np.concatenate([[0.0], np.geomspace(1e-3, 12.0, 24)])
    lam_min = float(np.linalg.eigvalsh(e0.matrix)[0])
    pts = np.array([e0.center + (r / lam_min) * v for v in u for r in radii])
    l0 = EllipsoidalDensity(profile_of(0.0), e0).value(pts)
    ls = EllipsoidalDensity(profile_of(small_s), es).value(pts)
    sup = float(np.max(np.abs(np.asarray(l0) - np.asarray(ls))))
    return param, sup


def gaussian_limit(f: LogDensity, opts: Optional[SolverOptions] = None,
                   curve_s: Optional[Sequence[float]] = (64.0, 256.0, 1024.0)
                   ) -> DEllipsoid:
    """Quadratic-profile covering optimum, cross-checked against the curve
    extrapolation. Raises InfeasibleError with the witness ray when no
    quadratic covering exists."""
    opts = opts or SolverOptions()
    rep = solve_lowner_s(f, INF, opts)
    if curve_s:
        curve = s_curve(f, list(curve_s), opts)
        if curve.limit_gaussian is not None:
            a_lim = np.asarray(curve.limit_gaussian.matrix)
            lam = curve.reports[-1].integral
            d = f.dimension
            ident = math.pi ** (d / 2.0) / float(np.linalg.det(a_lim))
            if abs(ident - lam) > 1e-9 * abs(lam):
                raise NumericalError("limit-matrix identity failed: "
                                     f"{ident} vs {lam}")
    return rep.optimum


def comparison_band(s1: float, s2: float, d: int) -> tuple[float, float]:
    """Bounds (lo, hi) with lo <= I(s1)/I(s2) <= hi for optimal covering
    integrals at 0 < s1 < s2 < inf."""
    if not (0 < s1 < s2) or math.isinf(s2):
        raise SchemaError("band requires 0 < s1 < s2 finite")
    v1 = v_psi(profile_of(s1), d)
    v2 = v_psi(profile_of(s2), d)
    log_factor = 0.5 * (s2 * math.log((d + s2) / s2)
                        + d * math.log((d + s2) / d))
    return v1 / v2, math.exp(log_factor) * v1 / v2


def adjacent_band_check(curve: SCurve, d: int) -> bool:
    """Every adjacent converged pair of the curve satisfies the two-sided
    integral comparison."""
    ok = True
    for i in range(len(curve.s_values) - 1):
        r1, r2 = curve.reports[i], curve.reports[i + 1]
        if not (r1.converged and r2.converged):
            continue
        lo, hi = comparison_band(curve.s_values[i], curve.s_values[i + 1], d)
        ratio = r1.integral / r2.integral
        ok = ok and (lo * (1.0 - 1e-9) <= ratio <= hi * (1.0 + 1e-9))
    return ok
