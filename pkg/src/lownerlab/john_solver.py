"""Inscribed-side solver: maximal-integral height function below an even f.

The inscribed family is h(x) = (1/alpha)(1 - |A^{-1}x|^2)^{s/2} supported on
A B^d, Gaussian (1/alpha) e^{-|A^{-1}x|^2} at s = inf. In the ball
parametrization x = A u the domination h <= f reads

    phi_f(A u) <= log(alpha) + eta_s(|u|)    for all |u| <= 1 (all u at inf),

one convex constraint in (A, beta = log alpha) per point u, so the covering
side's cutting-plane architecture transfers with masters.john_master as the
finite master. Maximizing the integral (det A / alpha) W_s means minimizing
beta - log det A.

Support containment: for finite s the closed image A B^d must stay inside
supp f. Violations live on the sphere |u| = 1 where eta_s is infinite for
s > 0, so they enter the master as directional support cuts, not as points.

Unstructured densities (numeric polars) enter the master through affine
minorants phi(y) >= w . y - c, valid for any w with c = sup_y (w.y - phi(y)).
For a polar that conjugate is the base's phi back again, so every cut
(w, phi_base(w)) is valid, and w = argmax_x (<x, y*> - phi_base(x)) makes it
supporting at y*.
"""
from __future__ import annotations

import math
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .core import (INF, CoverDensity, DEllipsoid, EllipsoidalDensity,
                   HeightDensity, GaussianDensity, GaugePowerDensity,
                   LogDensity, MinOfDensity, SolveReport, ray_level_radius,
                   sobol_sample, sphere_directions)
from .errors import InfeasibleError, NumericalError, SchemaError
from .integrals import w_s
from .legendre import NumericPolarDensity, eta_s, polar_density
from .lowner_solver import (SolverOptions, _append_unique, _theta_radius,
                            solve_lowner_s)
from .masters import ParameterBox, bounded_parts, john_master
from .psi_family import profile_of

__all__ = [
    "solve_john_s",
    "john_violation_search",
    "support_gaps",
    "even_duality_check",
]


def _is_structured(f: LogDensity) -> bool:
    if isinstance(f, MinOfDensity):
        return all(_is_structured(p) for p in f.parts)
    return isinstance(f, (EllipsoidalDensity, GaussianDensity,
                          GaugePowerDensity, HeightDensity))


# ---------------------------------------------------------------------------
# violation oracle in the ball parametrization


def john_violation_search(f: LogDensity, s: float, a_mat: np.ndarray,
                          beta: float, budget: int = 3000, seed: int = 0,
                          topk: int = 6
                          ) -> tuple[float, list[tuple[float, np.ndarray]], int, bool]:
    """Search sup over u of phi_f(A u) - beta - eta_s(|u|).

    Positive values certify h > f somewhere; +inf marks points of the open
    ball mapped outside supp f. Returns (margin, top (value, u) pairs, number
    of f evaluations, done flag)."""
    a_mat = np.asarray(a_mat, dtype=float)
    d = a_mat.shape[0]
    inv = np.linalg.inv(a_mat)
    finite_s = not math.isinf(s)
    evals = 0

    def vio_rows(arr):
        nonlocal evals
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        evals += len(arr)
        p = np.asarray(f.phi(arr @ a_mat.T), dtype=float)
        et = np.asarray(eta_s(s, np.linalg.norm(arr, axis=1)), dtype=float)
        out = np.full(len(arr), -INF)
        ok = np.isfinite(et)
        fin = ok & np.isfinite(p)
        out[fin] = p[fin] - beta - et[fin]
        out[ok & np.isinf(p)] = INF
        return out

    def vio_one(u):
        return float(vio_rows(np.asarray(u, dtype=float)[None, :])[0])

    mats = []
    for m in f.structure_matrices():
        b = np.asarray(m) @ a_mat
        mats.append(b.T @ b)
    dirs = sphere_directions(d, 16, seed, mats, f.structure_directions())
    if finite_s:
        radii = [0.0, 0.12, 0.25, 0.4, 0.55, 0.7, 0.82, 0.9, 0.95, 0.98, 0.995]
        if s == 0:
            radii.append(1.0)
        r_max = 1.0
    else:
        radii = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.5, 6.0, 8.0]
        r_max = 8.0
    pts = []
    for u in dirs:
        for r in radii:
            pts.append(r * u)
            pts.append(-r * u)
    mapped = []
    for c in f.centers():
        uc = inv @ np.asarray(c, dtype=float)
        n = float(np.linalg.norm(uc))
        if finite_s and n >= 1.0:
            uc = uc / n * 0.995
        mapped.append(uc)
    pts.extend(mapped)
    for i in range(len(mapped)):
        for j in range(i + 1, len(mapped)):
            pts.append(0.5 * (mapped[i] + mapped[j]))
    n_sobol = max(16, min(256, budget // 8))
    cloud = (sobol_sample(d, n_sobol, seed + 11) * 2.0 - 1.0) * r_max
    if finite_s:
        nn = np.linalg.norm(cloud, axis=1)
        cloud = cloud[nn <= 1.0]
    pts.extend(cloud)
    arr = np.array(pts)
    vals = vio_rows(arr)

    items: list[tuple[float, np.ndarray]] = []
    for idx in np.where(np.isposinf(vals))[0]:
        items.append((INF, arr[idx]))

    order = np.argsort(np.where(np.isfinite(vals), vals, -INF))[::-1]
    starts = []
    for idx in order[: 3 * topk]:
        if math.isfinite(vals[idx]):
            starts.append(arr[idx])
    per = max(120, budget // max(1, 2 * len(starts)))
    best_fin: list[tuple[float, np.ndarray]] = []
    clip_r = 1.0 if finite_s else INF

    def neg(u):
        u = np.asarray(u, dtype=float)
        n = float(np.linalg.norm(u))
        if n > clip_r:
            u = u / n * clip_r
        v = vio_one(u)
        if math.isinf(v):
            return -1e30 if v > 0 else 1e30
        return -v

    for u0 in starts[: 2 * topk]:
        res = optimize.minimize(neg, np.asarray(u0, dtype=float),
                                method="Nelder-Mead",
                                options={"xatol": 1e-11, "fatol": 1e-13,
                                         "maxfev": per})
        u1 = np.asarray(res.x, dtype=float)
        n = float(np.linalg.norm(u1))
        if n > clip_r:
            u1 = u1 / n * clip_r
        best_fin.append((vio_one(u1), u1))
    for idx in order[: 3 * topk]:
        if math.isfinite(vals[idx]):
            best_fin.append((float(vals[idx]), arr[idx]))

    done = True
    if not finite_s:
        tail = _tail_gap(f, inv, vio_one, seed)
        if tail is not None:
            val, u_t, confirmed = tail
            if confirmed:
                best_fin.append((val, u_t))
            else:
                done = False

    best_fin.sort(key=lambda t: t[0], reverse=True)
    for v, u in best_fin:
        if len(items) >= topk:
            break
        if any(np.linalg.norm(u - q) <= 1e-10 * (1.0 + np.linalg.norm(u))
               for _, q in items):
            continue
        items.append((v, u))
    margin = items[0][0] if items else -INF
    return margin, items[:topk], evals, done


def _tail_gap(f: LogDensity, inv: np.ndarray, vio_one, seed: int):
    """Quadratic-rate comparison along rays for the Gaussian profile: the
    inscribed rate |A^{-1}w|^2 must not exceed the rate of f."""
    d = inv.shape[0]
    dirs = sphere_directions(d, 12, seed + 3, f.structure_matrices(),
                             f.structure_directions())
    for v in dirs:
        for w in (v, -v):
            rf = f.quad_rate(w)
            rh = float(np.linalg.norm(inv @ np.asarray(w, dtype=float))) ** 2
            if math.isinf(rf) or rf <= rh * (1.0 + 1e-9) + 1e-15:
                continue
            t = 1.0
            while t <= 1e12:
                u_t = inv @ (t * np.asarray(w, dtype=float))
                val = vio_one(u_t)
                if val > 0:
                    return val, u_t, True
                t *= 2.0
            if rf > rh * (1.0 + 1e-6):
                return 0.0, inv @ np.asarray(w, dtype=float), False
    return None


def support_gaps(f: LogDensity, a_mat: np.ndarray, seed: int = 0
                 ) -> list[tuple[float, np.ndarray]]:
    """Per bounded-support part, max over |u| = 1 of |M(A u) - M a_c| - tau
    together with the maximizing direction. Positive gap: A B escapes the
    part's support."""
    a_mat = np.asarray(a_mat, dtype=float)
    out = []
    for m_mat, a_c, tau in bounded_parts(f):
        bmat = np.asarray(m_mat) @ a_mat
        b0 = np.asarray(m_mat) @ np.asarray(a_c, dtype=float)
        val, u = _sphere_max(bmat, b0, seed)
        out.append((val - tau, u))
    return out


def _sphere_max(bmat: np.ndarray, b0: np.ndarray, seed: int
                ) -> tuple[float, np.ndarray]:
    d = bmat.shape[1]

    def g(u):
        return float(np.linalg.norm(bmat @ u - b0))

    if d == 1:
        cands = [np.array([1.0]), np.array([-1.0])]
        vals = [g(u) for u in cands]
        i = int(np.argmax(vals))
        return vals[i], cands[i]
    _, _, vt = np.linalg.svd(bmat)
    starts = [vt[0], -vt[0], vt[-1]]
    gb = bmat.T @ b0
    n = float(np.linalg.norm(gb))
    if n > 1e-14:
        starts += [gb / n, -gb / n]
    rng = np.random.default_rng(seed)
    for _ in range(3):
        z = rng.standard_normal(d)
        starts.append(z / np.linalg.norm(z))
    best_v, best_u = -INF, starts[0]
    for s0 in starts:
        res = optimize.minimize(
            lambda z: -g(z / max(float(np.linalg.norm(z)), 1e-12)),
            np.asarray(s0, dtype=float), method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-14, "maxfev": 600})
        z = np.asarray(res.x, dtype=float)
        u = z / max(float(np.linalg.norm(z)), 1e-12)
        v = g(u)
        if v > best_v:
            best_v, best_u = v, u
    return best_v, best_u


# ---------------------------------------------------------------------------
# Fenchel cuts for unstructured densities


def _cut_at(f: LogDensity, y: np.ndarray) -> Optional[tuple[np.ndarray, float]]:
    y = np.asarray(y, dtype=float)
    if isinstance(f, NumericPolarDensity):
        v, x = f.phi_and_argmax(y)
        if not math.isfinite(v):
            return None
        c = float(np.asarray(f.base.phi(x)))
        if not (np.all(np.isfinite(x)) and math.isfinite(c)):
            return None
        return x, c
    p0 = float(np.asarray(f.phi(y)))
    if not math.isfinite(p0):
        return None
    d = len(y)
    h = 1e-6 * (1.0 + float(np.linalg.norm(y)))
    grad = np.zeros(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        pp = float(np.asarray(f.phi(y + e)))
        pm = float(np.asarray(f.phi(y - e)))
        if not (math.isfinite(pp) and math.isfinite(pm)):
            return None
        grad[i] = (pp - pm) / (2.0 * h)
    c = float(grad @ y - p0) + 1e-9 * (1.0 + abs(p0))
    return grad, c


def _escape_cuts(f: LogDensity, e_x: np.ndarray) -> list[tuple[np.ndarray, float]]:
    """Minorant cuts that steepen along an escaping image direction."""
    if not isinstance(f, NumericPolarDensity):
        return []
    e_x = np.asarray(e_x, dtype=float)
    n = float(np.linalg.norm(e_x))
    if n < 1e-14:
        return []
    e_x = e_x / n
    base = f.base
    rad = base.support_radius()
    if math.isfinite(rad):
        t_hi = ray_level_radius(base, np.zeros(len(e_x)), e_x, INF, cap=rad * 2)
        ts = [t_hi * frac for frac in (0.3, 0.6, 0.9, 0.99)]
    else:
        ts = [1.0, 4.0, 16.0, 64.0]
    cuts = []
    for t in ts:
        w = t * e_x
        c = float(np.asarray(base.phi(w)))
        if math.isfinite(c):
            cuts.append((w, c))
    return cuts


def _pull_u(f: LogDensity, a_mat: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Scale u toward the origin until phi(A u) is finite."""
    u = np.asarray(u, dtype=float)
    if math.isfinite(float(np.asarray(f.phi(a_mat @ u)))):
        return u
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if math.isfinite(float(np.asarray(f.phi(a_mat @ (mid * u))))):
            lo = mid
        else:
            hi = mid
    return lo * (1.0 - 1e-9) * u


# ---------------------------------------------------------------------------
# box and initial data


def _john_precheck(f: LogDensity, s: float, dirs) -> None:
    if isinstance(f, CoverDensity):
        raise SchemaError("inscribed solver requires a log-concave density")
    if math.isinf(s):
        if f.support_bounded():
            raise InfeasibleError(
                "no Gaussian fits below a bounded-support density",
                witness=np.asarray(dirs[0]))
        for v in dirs:
            for u in (v, -v):
                if math.isinf(f.quad_rate(u)):
                    raise InfeasibleError(
                        "f decays superquadratically along a ray; no "
                        "inscribed Gaussian exists", witness=np.asarray(u))


def _initial_scale(f: LogDensity, s: float, beta0: float, seed: int
                   ) -> float:
    d = f.dimension
    dirs = sphere_directions(d, 24, seed, f.structure_matrices(),
                             f.structure_directions())
    gamma = min(_theta_radius(f, 0.5 * f.sup_norm, dirs), 1e9)
    last_u = None
    for _ in range(80):
        margin, items, _, _ = john_violation_search(
            f, s, gamma * np.eye(d), beta0, budget=900, seed=seed)
        gaps = support_gaps(f, gamma * np.eye(d), seed)
        if gaps:
            margin = max(margin, max(g for g, _ in gaps))
        if margin <= 0.0:
            return gamma
        last_u = items[0][1] if items else None
        gamma *= 0.5
    raise InfeasibleError("no inscribed start found down to scale 2^-80",
                          witness=last_u)


def _john_box(f: LogDensity, s: float, d: int, gamma0: float, beta0: float,
              seed: int) -> ParameterBox:
    norm_f = f.sup_norm
    alpha_lo = (1.0 / norm_f) * (1.0 - 1e-9)
    alpha_hi = math.exp(d) / norm_f * 1.05
    lvl_hi = math.log(alpha_hi)
    dirs = sphere_directions(d, 24, seed, f.structure_matrices(),
                             f.structure_directions())
    if math.isinf(s):
        r_grid = [1.0, 2.0, 4.0, 8.0]
    elif s == 0:
        r_grid = [0.9, 1.0]
    else:
        r_grid = [0.5, 0.9, 0.97]
    eig_hi = INF
    for r in r_grid:
        lvl = lvl_hi + float(eta_s(s, r))
        reach = max(ray_level_radius(f, np.zeros(d), u, lvl, cap=1e9)
                    for u in dirs)
        reach = max(reach,
                    max(ray_level_radius(f, np.zeros(d), -u, lvl, cap=1e9)
                        for u in dirs))
        eig_hi = min(eig_hi, reach / r * 1.2)
    if f.support_bounded():
        eig_hi = min(eig_hi, f.support_radius() * 1.0001)
    eig_hi = max(eig_hi, 1.5 * gamma0)
    obj0 = beta0 - d * math.log(gamma0)
    det_lo = alpha_lo * math.exp(-obj0)
    eig_lo = det_lo / eig_hi ** (d - 1) / 10.0
    eig_lo = min(eig_lo, 0.5 * gamma0)
    return ParameterBox(eig_lo=eig_lo, eig_hi=eig_hi, alpha_lo=alpha_lo,
                        alpha_hi=alpha_hi, center_ref=np.zeros(d),
                        center_radius=0.0)


def _initial_u_points(f: LogDensity, s: float, seed: int) -> list[np.ndarray]:
    d = f.dimension
    dirs = sphere_directions(d, 16, seed, f.structure_matrices(),
                             f.structure_directions())
    if math.isinf(s):
        radii = [0.25, 0.5, 1.0, 2.0, 4.0, 6.0]
    elif s == 0:
        radii = [0.25, 0.5, 0.75, 0.9, 0.97, 1.0]
    else:
        radii = [0.25, 0.5, 0.75, 0.9, 0.97]
    pts: list[np.ndarray] = [np.zeros(d)]
    for u in dirs:
        for r in radii:
            _append_unique(pts, r * u)
            _append_unique(pts, -r * u)
    return pts


# ---------------------------------------------------------------------------
# the solver


def _trusted_john_master(u_pts, f, s, box: ParameterBox, incumbent_a,
                         opts: SolverOptions, cuts=None, support_dirs=None):
    """john_master over an eigenvalue window around the incumbent, widened
    toward the proven box whenever the solution presses an interior edge."""
    ev_inc = np.linalg.eigvalsh(np.asarray(incumbent_a, dtype=float))
    lo = max(box.eig_lo, float(ev_inc[0]) / 16.0)
    hi = min(box.eig_hi, float(ev_inc[-1]) * 16.0)
    out = None
    for _ in range(10):
        sub = replace(box, eig_lo=lo, eig_hi=hi)
        out = john_master(u_pts, f, s, sub, solver=opts.master_solver,
                          cuts=cuts, support_dirs=support_dirs)
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


def solve_john_s(f: LogDensity, s: float,
                 opts: Optional[SolverOptions] = None) -> SolveReport:
    """Maximal-integral inscribed height function of an even density."""
    if not (s >= 0 or math.isinf(s)):
        raise SchemaError(f"s must lie in [0, inf], got {s}")
    opts = opts or SolverOptions()
    d = f.dimension
    if not f.is_even():
        raise SchemaError("inscribed solver requires an even density "
                          "(center pinned at the origin)")
    dirs = sphere_directions(d, 24, opts.seed, f.structure_matrices(),
                             f.structure_directions())
    _john_precheck(f, s, dirs)

    beta0 = math.log(2.0 / f.sup_norm)
    gamma0 = _initial_scale(f, s, beta0, opts.seed)
    box = opts.box or _john_box(f, s, d, gamma0, beta0, opts.seed)

    structured = _is_structured(f)
    cuts: Optional[list[tuple[np.ndarray, float]]] = None
    if not structured:
        cuts = []
        for u in dirs:
            for r in (0.5 * gamma0, gamma0):
                for sgn in (1.0, -1.0):
                    cut = _cut_at(f, sgn * r * np.asarray(u))
                    if cut is not None:
                        cuts.append(cut)
        if not cuts:
            raise NumericalError("no initial minorant cuts found")

    support_dirs: list[np.ndarray] = []
    if bounded_parts(f):
        support_dirs = [np.asarray(u) for u in dirs[: 2 * d]]
        support_dirs += [-np.asarray(u) for u in dirs[: 2 * d]]

    u_pts = _initial_u_points(f, s, opts.seed)
    if opts.initial_points == "user" and opts.user_points is not None:
        for u in np.atleast_2d(np.asarray(opts.user_points, dtype=float)):
            _append_unique(u_pts, u)

    a_val = gamma0 * np.eye(d)
    beta_val = beta0
    obj = beta0 - d * math.log(gamma0)
    margin = INF
    converged = False
    iterations = 0
    prev_obj = None
    for it in range(opts.max_outer_iterations):
        iterations = it + 1
        a_val, beta_val, obj, status = _trusted_john_master(
            np.array(u_pts), f, s, box, a_val, opts,
            cuts=cuts, support_dirs=support_dirs)
        margin, items, ev, done = john_violation_search(
            f, s, a_val, beta_val, budget=opts.oracle_budget,
            seed=opts.seed + it, topk=8)
        gaps = support_gaps(f, a_val, opts.seed + it)
        if gaps:
            margin = max(margin, max(g for g, _ in gaps))
        if margin <= opts.feasibility_tol and done:
            stable = prev_obj is not None and abs(obj - prev_obj) <= max(
                opts.objective_tol, 1e-12 * abs(obj))
            new_any = False
            for v, u in items:
                if math.isfinite(v) and v > -opts.feasibility_tol:
                    new_any = _append_unique(u_pts, u) or new_any
            if stable or not new_any:
                converged = True
                break
            prev_obj = obj
            continue
        added = False
        for v, u in items:
            if math.isinf(v):
                added = _append_unique(u_pts, u) or added
                if not structured:
                    ub = _pull_u(f, a_val, u)
                    added = _append_unique(u_pts, ub) or added
                    for cut in _escape_cuts(f, a_val @ u):
                        cuts.append(cut)
                        added = True
            elif v > 0.01 * opts.feasibility_tol:
                added = _append_unique(u_pts, u) or added
                if not structured:
                    cut = _cut_at(f, a_val @ u)
                    if cut is not None:
                        cuts.append(cut)
                        added = True
        for gap, w in gaps:
            if gap > 0.01 * opts.feasibility_tol:
                if not any(np.linalg.norm(w - q) <= 1e-9 for q in support_dirs):
                    support_dirs.append(w)
                    added = True
        if not added:
            converged = margin <= 10.0 * opts.feasibility_tol
            break
        prev_obj = obj

    optimum = DEllipsoid(a_val, math.exp(beta_val), np.zeros(d))
    integral = math.exp(-obj) * w_s(s, d)
    return SolveReport(optimum=optimum, objective=obj, integral=integral,
                       active_points=tuple(u_pts), max_violation=margin,
                       iterations=iterations, converged=converged,
                       side="john")


# ---------------------------------------------------------------------------
# duality of the two solvers on even inputs


def _centered(e: DEllipsoid) -> DEllipsoid:
    return DEllipsoid(np.asarray(e.matrix), e.height, np.zeros(e.dim))


def _dual_grids(ell: EllipsoidalDensity, h: HeightDensity, s: float,
                seed: int) -> tuple[np.ndarray, np.ndarray]:
    d = ell.dimension
    dirs = sphere_directions(d, 10, seed)
    prof = profile_of(s)
    lam_min = float(np.linalg.eigvalsh(ell.e.matrix)[0])
    t8 = prof.inverse(8.0)
    r1 = (t8 if math.isfinite(t8) else 8.0) / lam_min
    lam_max = float(np.linalg.eigvalsh(h.e.matrix)[-1])
    r2 = 2.5 * lam_max if math.isinf(s) else 1.15 * lam_max
    g1 = [r * u for u in dirs for r in np.linspace(0.0, r1, 14)]
    g2 = [r * u for u in dirs for r in np.linspace(0.0, r2, 14)]
    return np.array(g1), np.array(g2)


def even_duality_check(f: LogDensity, s: float, grids=None,
                       opts: Optional[SolverOptions] = None
                       ) -> tuple[float, float]:
    """Sup-norm residuals of the two polar identities between the solvers:
    conj(inscribed(f)) vs covering(polar f), and conj(covering(f)) vs
    inscribed(polar f). Both conjugations are numerical; the four optima come
    from independent solves."""
    if not f.is_even():
        raise SchemaError("even_duality_check requires an even density")
    opts = opts or SolverOptions()
    fp = polar_density(f)
    opts_p = opts
    if isinstance(fp, NumericPolarDensity):
        opts_p = replace(opts, oracle_budget=min(opts.oracle_budget, 1500),
                         initial_points="sobol_box")
    rep_j1 = solve_john_s(f, s, opts)
    rep_l1 = solve_lowner_s(fp, s, opts_p)
    rep_l2 = solve_lowner_s(f, s, opts)
    rep_j2 = solve_john_s(fp, s, opts_p)

    h_j1 = HeightDensity(s, _centered(rep_j1.optimum))
    ell_l1 = EllipsoidalDensity(profile_of(s), _centered(rep_l1.optimum))
    ell_l2 = EllipsoidalDensity(profile_of(s), _centered(rep_l2.optimum))
    h_j2 = HeightDensity(s, _centered(rep_j2.optimum))

    if grids is None:
        g1, g2 = _dual_grids(ell_l1, h_j2, s, opts.seed)
    elif isinstance(grids, (tuple, list)) and len(grids) == 2:
        g1, g2 = (np.atleast_2d(np.asarray(g, dtype=float)) for g in grids)
    else:
        g1 = g2 = np.atleast_2d(np.asarray(grids, dtype=float))

    conj_j = NumericPolarDensity(h_j1)
    res1 = float(np.max(np.abs(np.asarray(conj_j.value(g1))
                               - np.asarray(ell_l1.value(g1)))))
    conj_l = NumericPolarDensity(ell_l2)
    res2 = float(np.max(np.abs(np.asarray(conj_l.value(g2))
                               - np.asarray(h_j2.value(g2)))))
    return res1, res2
