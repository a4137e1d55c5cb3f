"""Covering-side solver: the minimal-integral profile-ellipsoidal function
above a given log-concave f.

Semi-infinite convex program solved by cutting planes: a finite master over
(A, b, mu) (see masters.lowner_master) alternating with a violation oracle
that searches sup (log f - log ell) and feeds the worst points back as new
constraints. The master is a relaxation, so once the oracle certifies
feasibility the incumbent is optimal up to the oracle's tolerance.

Parameter box: with Theta = ||f||/2 and a radius theta such that f >= Theta
on the ball of that radius around the mode, and delta the integral of the
first feasible covering found,

  * ||f|| <= alpha <= e^d ||f||            (height two-sided bound),
  * sigma_max(A) <= e^d ||f|| lambda1 / (2 theta Theta): the line integral of
    the covering along any line through the mode is at most
    alpha lambda1 / |A v| and at least 2 theta Theta,
  * det A >= ||f|| V_psi / delta (the optimum integral is at most delta),
    giving the smallest-eigenvalue floor,
  * |a - mode| <= 2 d delta / (Theta theta^(d-1) omega_(d-1)): the region
    {ell >= Theta} is convex, contains the mode ball and the center, so it
    contains a cone whose volume lower-bounds delta / Theta,
  * |A (a - mode)| <= psi^{-1}(log(alpha_hi / ||f||)): the covering must reach
    f at the mode. The master carries the center bound in this image metric,
    taking the smaller of the two radii.

Masters are solved over an eigenvalue window around the incumbent that is
widened toward the proven box whenever the solution presses a window edge;
a solution clear of the edges is optimal for the full box by convexity, and
the narrow window keeps the conic subproblems well conditioned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import (INF, AdmissibleProfile, Certificate, DEllipsoid,
                   EllipsoidalDensity, LogDensity, MinOfDensity, SolveReport,
                   flat_bottom_profile, is_below, ray_level_radius,
                   sobol_sample, sphere_directions, violation_search)
from .errors import InfeasibleError, NumericalError, SchemaError
from .integrals import lambda1, unit_ball_volume, v_psi
from .masters import ParameterBox, lowner_master, profile_tangents
from .psi_family import profile_of

__all__ = [
    "SolverOptions",
    "solve_lowner",
    "solve_lowner_s",
    "height_bound_check",
    "chimera_demo",
    "derive_box",
    "initial_cover",
]


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for both cutting-plane solvers.

    ``initial_points``: "levelset_extremes" (structured level-set probes),
    "sobol_box" (low-discrepancy cloud), or "user" (use ``user_points``).
    ``box`` overrides the derived parameter box when given.
    """

    feasibility_tol: float = 1e-8
    objective_tol: float = 1e-9
    max_outer_iterations: int = 200
    initial_points: str = "levelset_extremes"
    box: Optional[ParameterBox] = None
    seed: int = 0
    user_points: Optional[np.ndarray] = None
    oracle_budget: int = 4000
    master_solver: str = "CLARABEL"

    def __post_init__(self):
        if not (self.feasibility_tol > 0 and self.objective_tol > 0):
            raise SchemaError("solver tolerances must be positive")
        if self.initial_points not in ("levelset_extremes", "sobol_box", "user"):
            raise SchemaError(f"unknown initial-point strategy "
                              f"{self.initial_points!r}")
        if self.max_outer_iterations < 1:
            raise SchemaError("max_outer_iterations must be at least 1")


# ---------------------------------------------------------------------------
# feasibility prechecks and the initial covering


def _structural_precheck(f: LogDensity, profile: AdmissibleProfile,
                         dirs) -> None:
    if math.isfinite(profile.domain_bound) and not f.support_bounded():
        raise InfeasibleError(
            "bounded-domain profile cannot cover an unbounded support",
            witness=np.asarray(dirs[0]))
    if profile.s is not None and math.isinf(profile.s):
        for u in dirs:
            for v in (u, -u):
                if f.quad_rate(v) == 0.0:
                    raise InfeasibleError(
                        "no quadratic-profile covering exists: f decays "
                        "subquadratically along a ray", witness=np.asarray(v))


def initial_cover(f: LogDensity, profile: AdmissibleProfile,
                  seed: int = 0, budget: int = 1500
                  ) -> tuple[DEllipsoid, Certificate]:
    """A feasible covering with alpha = 2 ||f|| and A = gamma Id, gamma found
    by bisection on the domination certificate. Raises InfeasibleError when
    no scale works."""
    d = f.dimension
    dirs = sphere_directions(d, 24, seed, f.structure_matrices(),
                             f.structure_directions())
    _structural_precheck(f, profile, dirs)
    alpha0 = 2.0 * f.sup_norm
    mode = np.asarray(f.mode, dtype=float)
    gamma = 1.0
    cert = None
    for _ in range(80):
        e = DEllipsoid(gamma * np.eye(d), alpha0, mode)
        cert = is_below(f, profile, e, budget=budget, seed=seed)
        if cert.holds:
            break
        gamma *= 0.5
    else:
        raise InfeasibleError(
            "no isotropic covering found down to scale 1e-24",
            witness=cert.witness if cert else None)
    # push gamma back up for a tighter first integral
    for _ in range(10):
        trial = DEllipsoid(1.5 * gamma * np.eye(d), alpha0, mode)
        cert_t = is_below(f, profile, trial, budget=budget, seed=seed)
        if not cert_t.holds:
            break
        gamma *= 1.5
        cert = cert_t
    return DEllipsoid(gamma * np.eye(d), alpha0, mode), cert


def _theta_radius(f: LogDensity, threshold: float, dirs) -> float:
    """Largest r (times 0.9) with min over directions f(mode + r u) above the
    threshold, by doubling plus bisection."""
    mode = np.asarray(f.mode, dtype=float)

    def ok(r: float) -> bool:
        pts = np.array([mode + r * u for u in dirs]
                       + [mode - r * u for u in dirs])
        vals = np.asarray(f.value(pts))
        return bool(np.all(vals >= threshold))

    hi = 1e-3
    while hi < 1e12 and ok(hi):
        hi *= 2.0
    if hi >= 1e12:
        return 0.9e12
    lo = hi / 2.0 if hi > 1e-3 else 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return 0.9 * lo if lo > 0 else 0.45 * hi


def derive_box(f: LogDensity, profile: AdmissibleProfile, d: int,
               delta: float, init_gamma: float, seed: int = 0) -> ParameterBox:
    norm_f = f.sup_norm
    theta_big = 0.5 * norm_f
    dirs = sphere_directions(d, 24, seed, f.structure_matrices(),
                             f.structure_directions())
    theta = _theta_radius(f, theta_big, dirs)
    lam1 = lambda1(profile)
    vol = v_psi(profile, d)
    alpha_lo = norm_f * (1.0 - 1e-9)
    alpha_hi = math.exp(d) * norm_f * 1.05
    eig_hi = math.exp(d) * norm_f * lam1 / (2.0 * theta * theta_big) * 2.0
    eig_hi = max(eig_hi, 2.0 * init_gamma)
    eig_lo = norm_f * vol / (delta * eig_hi ** (d - 1)) / 10.0
    eig_lo = min(eig_lo, 0.5 * init_gamma)
    rho = 2.0 * d * delta / (theta_big * theta ** (d - 1)
                             * unit_ball_volume(d - 1) if d > 1
                             else theta_big)
    if d == 1:
        rho = 2.0 * delta / theta_big
    # covering the mode forces psi(|A mode - b|) <= log(alpha_hi / ||f||),
    # usually a far tighter center bound than rho * eig_hi
    level = math.log(alpha_hi) - math.log(norm_f)
    r_img = profile.inverse(level * (1.0 + 1e-6))
    return ParameterBox(eig_lo=eig_lo, eig_hi=eig_hi, alpha_lo=alpha_lo,
                        alpha_hi=alpha_hi,
                        center_ref=np.asarray(f.mode, dtype=float),
                        center_radius=min(rho * eig_hi, r_img))


# ---------------------------------------------------------------------------
# initial constraint points


def _levelset_points(f: LogDensity, seed: int) -> np.ndarray:
    d = f.dimension
    dirs = sphere_directions(d, 16, seed, f.structure_matrices(),
                             f.structure_directions())
    anchors = [np.asarray(c, dtype=float) for c in f.centers()]
    pts = list(anchors)
    for i in range(len(anchors)):
        for j in range(i + 1, len(anchors)):
            pts.append(0.5 * (anchors[i] + anchors[j]))
    lvl0 = float(np.asarray(f.phi(np.asarray(f.mode))))
    for anchor in anchors:
        for u in dirs:
            for lv in (0.5, 1.0, 2.0, 4.0):
                for sgn in (1.0, -1.0):
                    t = ray_level_radius(f, anchor, sgn * u, lvl0 + lv,
                                         cap=1e7)
                    if t < 1e7:
                        pts.append(anchor + sgn * t * u)
    return np.array(pts)


def _sobol_points(f: LogDensity, seed: int, n: int = 128) -> np.ndarray:
    d = f.dimension
    mode = np.asarray(f.mode, dtype=float)
    dirs = sphere_directions(d, 8, seed, f.structure_matrices(), [])
    lvl0 = float(np.asarray(f.phi(mode)))
    r = max(ray_level_radius(f, mode, u, lvl0 + 2.0 * d + 4.0, cap=1e7)
            for u in dirs)
    cloud = mode + (sobol_sample(d, n, seed) * 2.0 - 1.0) * min(r, 1e6)
    return np.vstack([cloud, mode[None, :]])


def _initial_points(f: LogDensity, opts: SolverOptions) -> np.ndarray:
    if opts.initial_points == "user":
        if opts.user_points is None:
            raise SchemaError("initial_points='user' requires user_points")
        base = np.atleast_2d(np.asarray(opts.user_points, dtype=float))
        return np.vstack([base, np.asarray(f.mode, dtype=float)[None, :]])
    if opts.initial_points == "sobol_box":
        return _sobol_points(f, opts.seed)
    return _levelset_points(f, opts.seed)


def _append_unique(points: list[np.ndarray], x: np.ndarray,
                   tol: float = 1e-11) -> bool:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        return False
    for q in points:
        if np.linalg.norm(q - x) <= tol * (1.0 + np.linalg.norm(x)):
            return False
    points.append(x)
    return True


def _separated(points: list[np.ndarray], x: np.ndarray,
               mode: np.ndarray, rel: float = 1e-4) -> bool:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        return False
    gap = rel * (1.0 + float(np.linalg.norm(x - mode)))
    return all(np.linalg.norm(q - x) > gap for q in points)


def _master_residual(arr: np.ndarray, phis: np.ndarray,
                     profile: AdmissibleProfile, a_val: np.ndarray,
                     b_val: np.ndarray, mu_val: float) -> float:
    """Worst violation of the master's own constraints by its solution;
    the floor below which no oracle margin can be driven."""
    r = np.linalg.norm(arr @ a_val.T - b_val, axis=1)
    vals = np.asarray(profile.eval(r), dtype=float)
    fin = np.isfinite(vals)
    if not np.any(fin):
        return 0.0
    return max(float(np.max(vals[fin] - phis[fin] - mu_val)), 0.0)


# ---------------------------------------------------------------------------
# the cutting-plane loop


def _finite_phi(f: LogDensity, pts: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.array(pts)
    phis = np.asarray(f.phi(arr), dtype=float)
    keep = np.isfinite(phis)
    return arr[keep], phis[keep]


def _growth_caps(f: LogDensity, profile: AdmissibleProfile,
                 dirs) -> Optional[list[tuple[np.ndarray, float]]]:
    """Rays along which any feasible covering must satisfy |A v| <= bound.

    Along x = mode + t v the covering decays like psi(t |A v|) and f like
    sigma(v) t (or q(v) t^2 for the quadratic profile), so matching growth is
    necessary for domination; these rows close the slope-active geometries
    that finite point samples only approach."""
    if f.support_bounded():
        return None
    caps: list[tuple[np.ndarray, float]] = []
    quad = profile.s is not None and math.isinf(profile.s)
    g = profile.growth_slope
    for u in dirs:
        u = np.asarray(u, dtype=float)
        if quad:
            q = min(f.quad_rate(u), f.quad_rate(-u))
            if math.isfinite(q) and q > 0:
                caps.append((u, math.sqrt(q)))
        elif math.isfinite(g) and g > 0:
            sig = min(f.tail_slope(u), f.tail_slope(-u))
            if math.isfinite(sig):
                caps.append((u, sig / g))
    return caps or None


def _trusted_master(arr, phis, profile, box: ParameterBox,
                    incumbent: DEllipsoid, opts: SolverOptions,
                    tangents=None, center_target=None, objective_cap=None,
                    norm_caps=None):
    """Master solve over an eigenvalue window around the incumbent, widening
    toward the proven box whenever the solution presses an interior edge."""
    ev_inc = incumbent.eigvals()
    lo = max(box.eig_lo, float(ev_inc[0]) / 16.0)
    hi = min(box.eig_hi, float(ev_inc[-1]) * 16.0)
    out = None
    for _ in range(10):
        sub = replace(box, eig_lo=lo, eig_hi=hi)
        out = lowner_master(arr, phis, profile, sub,
                            solver=opts.master_solver, tangents=tangents,
                            center_target=center_target,
                            objective_cap=objective_cap,
                            norm_caps=norm_caps)
        ev = np.linalg.eigvalsh(out[0])
        widened = False
        if ev[-1] >= 0.9 * hi and hi < box.eig_hi:
            hi = min(box.eig_hi, 16.0 * hi)
            widened = True
        if ev[0] <= 1.15 * lo and lo > box.eig_lo:
            lo = max(box.eig_lo, lo / 16.0)
            widened = True
        if not widened:
            break
    return out


def solve_lowner(f: LogDensity, profile: AdmissibleProfile,
                 opts: Optional[SolverOptions] = None) -> SolveReport:
    """Minimal-integral covering of f within the profile's affine family."""
    opts = opts or SolverOptions()
    d = f.dimension
    init, init_cert = initial_cover(f, profile, seed=opts.seed)
    vol = v_psi(profile, d)
    delta = init.height / init.det() * vol
    box = opts.box or derive_box(f, profile, d, delta,
                                 float(init.eigvals()[0]), seed=opts.seed)

    generic = profile.s is None and profile.pieces is None
    tangents = (profile_tangents(profile, np.geomspace(1e-3, 100.0, 48))
                if generic else None)
    cap_dirs = sphere_directions(d, 24, opts.seed, f.structure_matrices(),
                                 f.structure_directions())
    norm_caps = _growth_caps(f, profile, cap_dirs)

    points: list[np.ndarray] = []
    for x in _initial_points(f, opts):
        _append_unique(points, x)

    best = init
    best_val = math.log(init.height) - math.log(init.det())
    best_margin = float(init_cert.margin)
    have_cert = False
    have_soft = False
    evals = 0
    converged = False
    iterations = 0
    prev_obj = None
    certified = 0
    soft = 0
    soft_margin = None
    mode = np.asarray(f.mode, dtype=float)
    for it in range(opts.max_outer_iterations):
        iterations = it + 1
        arr, phis = _finite_phi(f, points)
        if len(arr) == 0:
            raise NumericalError("no finite constraint points")
        a_val, b_val, mu_val, obj, status = _trusted_master(
            arr, phis, profile, box, best, opts, tangents=tangents,
            norm_caps=norm_caps)
        try:
            cand = DEllipsoid(a_val, math.exp(mu_val),
                              np.linalg.solve(a_val, b_val))
        except SchemaError:
            raise NumericalError("master returned an invalid matrix")
        margin, top, ev, done = violation_search(
            f, profile, cand, budget=opts.oracle_budget, seed=opts.seed + it,
            topk=8)
        evals += ev
        # an inaccurate master reports an objective inconsistent with its own
        # candidate; score the candidate by what it actually achieves
        obj_c = math.log(cand.height) - math.log(cand.det())
        # no oracle margin can be driven below the master's own residual
        noise = max(opts.feasibility_tol,
                    4.0 * _master_residual(arr, phis, profile, a_val,
                                           b_val, mu_val))
        if margin <= opts.feasibility_tol and done:
            # candidates certified by the oracle compete on objective value;
            # an inaccurate master can emit a slack cover that must not
            # displace a tighter certified incumbent
            if not have_cert or obj_c <= best_val:
                best, best_val, best_margin = cand, obj_c, margin
                have_cert = True
            certified += 1
            stable = prev_obj is not None and abs(obj_c - prev_obj) <= max(
                opts.objective_tol, 1e-12 * abs(obj_c))
            new_any = False
            for v, x in top:
                # near-active points tighter than the separation scale add
                # conditioning trouble without new constraint information
                if v > -opts.feasibility_tol and _separated(points, x, mode):
                    new_any = _append_unique(points, x) or new_any
            if stable or not new_any or certified >= 3:
                converged = True
                break
            prev_obj = obj_c
            continue
        certified = 0
        if margin <= noise and done:
            # violation inside the master's noise floor: keep refining only
            # while the margin still shrinks, then accept at the accuracy the
            # master can actually deliver, honestly recorded in the margin
            if not have_cert and obj_c <= best_val:
                best, best_val, best_margin = cand, obj_c, margin
            soft += 1
            improving = soft_margin is None or margin <= 0.5 * soft_margin
            soft_margin = margin if soft_margin is None else min(
                soft_margin, margin)
            new_any = False
            if improving and soft < 4:
                for v, x in top:
                    if v > opts.feasibility_tol * 0.01:
                        new_any = _append_unique(points, x) or new_any
            if not (improving and new_any):
                have_soft = True
                converged = True
                break
            prev_obj = obj_c
            continue
        soft = 0
        soft_margin = None
        added = False
        for v, x in top:
            if v > opts.feasibility_tol * 0.01 or math.isinf(v):
                if math.isinf(v):
                    # pull the witness back to where f is still positive
                    x = _pull_inside(f, x)
                added = _append_unique(points, x) or added
        if generic:
            radii = [float(np.linalg.norm(a_val @ x - b_val)) for x in arr[-64:]]
            tangents = tangents + profile_tangents(profile, radii)
        if not added:
            # oracle found nothing new to cut with; accept with margin flag
            if margin <= 10.0 * opts.feasibility_tol:
                if not have_cert or obj_c <= best_val:
                    best, best_val, best_margin = cand, obj_c, margin
                converged = True
            else:
                converged = have_cert or have_soft
            break
        prev_obj = obj_c

    converged = converged and (have_cert or have_soft or best is not init)
    integral = best.height / best.det() * vol
    return SolveReport(optimum=best, objective=best_val, integral=integral,
                       active_points=tuple(points), max_violation=best_margin,
                       iterations=iterations, converged=converged,
                       side="lowner")


def _pull_inside(f: LogDensity, x: np.ndarray) -> np.ndarray:
    """Move a support-violation witness to a nearby point with f > 0."""
    mode = np.asarray(f.mode, dtype=float)
    x = np.asarray(x, dtype=float)
    lo, hi = 0.0, 1.0
    if math.isfinite(float(np.asarray(f.phi(x)))):
        return x
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if math.isfinite(float(np.asarray(f.phi(mode + mid * (x - mode))))):
            lo = mid
        else:
            hi = mid
    return mode + lo * (x - mode)


def solve_lowner_s(f: LogDensity, s: float,
                   opts: Optional[SolverOptions] = None) -> SolveReport:
    """solve_lowner with the interpolation-family profile of parameter s."""
    return solve_lowner(f, profile_of(s), opts)


def height_bound_check(report: SolveReport, f: LogDensity) -> bool:
    """||f|| <= alpha <= e^d ||f|| for a converged covering report."""
    alpha = report.optimum.height
    d = report.optimum.dim
    tol = 1e-7
    return (f.sup_norm * (1.0 - tol) <= alpha
            <= math.exp(d) * f.sup_norm * (1.0 + tol))


# ---------------------------------------------------------------------------
# non-uniqueness demonstration


def chimera_demo(tau: float, d: int = 1,
                 opts: Optional[SolverOptions] = None
                 ) -> tuple[SolveReport, SolveReport]:
    """Two optimal coverings of the same flat-bottom instance with distinct
    centers and equal objectives.

    Profile max(0, t - tau); f = min of the two translates of its radial
    function at +/- c with |c| = tau. Every center rho c with |rho| <= 1 is
    optimal. After a first solve fixes the optimal value, two more master
    solves walk the optimal face toward the targets rho = 0 and rho = 1,
    re-certifying each with the violation oracle.
    """
    if not tau > 0:
        raise SchemaError("tau must be positive")
    opts = opts or SolverOptions()
    profile = flat_bottom_profile(tau, 1.0)
    c = np.zeros(d)
    c[0] = tau
    parts = tuple(
        EllipsoidalDensity(profile, DEllipsoid(np.eye(d), 1.0, sgn * c))
        for sgn in (1.0, -1.0))
    f = MinOfDensity(parts)

    base = solve_lowner(f, profile, opts)
    if not base.converged:
        raise NumericalError("chimera base solve did not converge")

    walk_dirs = sphere_directions(d, 24, opts.seed, f.structure_matrices(),
                                  f.structure_directions())
    walk_caps = _growth_caps(f, profile, walk_dirs)
    reports = []
    for target in (np.zeros(d), c.copy()):
        pts = [np.asarray(p) for p in base.active_points]
        cap = base.objective + 1e-12
        report = None
        for attempt in range(40):
            arr, phis = _finite_phi(f, pts)
            box = opts.box or _chimera_box(f, profile, d, base, opts.seed)
            a_val, b_val, mu_val, obj, status = _trusted_master(
                arr, phis, profile, box, base.optimum, opts,
                center_target=target, objective_cap=cap,
                norm_caps=walk_caps)
            cand = DEllipsoid(a_val, math.exp(mu_val),
                              np.linalg.solve(a_val, b_val))
            margin, top, ev, done = violation_search(
                f, profile, cand, budget=opts.oracle_budget,
                seed=opts.seed + attempt, topk=8)
            if margin <= opts.feasibility_tol and done:
                vol = v_psi(profile, d)
                report = SolveReport(
                    optimum=cand, objective=obj,
                    integral=cand.height / cand.det() * vol,
                    active_points=tuple(pts), max_violation=margin,
                    iterations=base.iterations + attempt + 1, converged=True,
                    side="lowner")
                break
            added = False
            for v, x in top:
                if v > opts.feasibility_tol * 0.01 or math.isinf(v):
                    if math.isinf(v):
                        x = _pull_inside(f, x)
                    added = _append_unique(pts, x) or added
            if not added:
                cap += 1e-11
        if report is None:
            raise NumericalError("chimera face walk did not certify")
        reports.append(report)
    return reports[0], reports[1]


def _chimera_box(f, profile, d, base: SolveReport, seed: int) -> ParameterBox:
    vol = v_psi(profile, d)
    delta = base.integral * (1.0 + 1e-9)
    return derive_box(f, profile, d, delta,
                      float(base.optimum.eigvals()[0]), seed=seed)
