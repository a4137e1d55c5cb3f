"""Conic master problems shared by the covering and inscribed solvers.

Both sides are semi-infinite convex programs solved by cutting planes; this
module owns the finite master at each outer iteration.

Covering side, variables (A symmetric PD, b, mu) with b = A a, mu = log alpha:

    minimize  mu - log det A
    s.t.      psi(|A x_k - b|) <= mu + phi(x_k)   for the current points x_k.

psi-compositions are encoded exactly: norm for psi(t) = t, sum of squares for
t^2, per-piece affine bounds for piecewise-linear profiles, and for the psi_s
family the lifted form with w >= sqrt(1 + 4 |v|^2 / s^2) via a second-order
cone plus the increasing convex scalar map (s/2)(w - 1 - log((1 + w)/2)) --
exact because that map is increasing in w, so the lifted constraint binds at
w = sqrt(...). Generic profiles use supporting tangents refined per iteration.

Inscribed side, variables (A symmetric PD, beta = log alpha) over the ball
parametrization x = A u:

    minimize  beta - log det A
    s.t.      phi_f(A u_k) <= beta + eta_s(|u_k|),

with eta_s the conjugate profile (constant per point) and phi_f encoded per
structured kind; unstructured densities enter through affine minorants
(Fenchel cuts) refined per iteration.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import cvxpy as cp
import numpy as np

from .core import (AdmissibleProfile, EllipsoidalDensity, GaussianDensity,
                   GaugePowerDensity, HeightDensity, LogDensity, MinOfDensity)
from .errors import InfeasibleError, NumericalError, SchemaError
from .legendre import eta_s

__all__ = [
    "ParameterBox",
    "solve_conic",
    "profile_tangents",
    "lowner_master",
    "john_master",
    "bounded_parts",
]


@dataclass
class ParameterBox:
    """Compact parameter region guaranteed to contain the optimum.

    ``center_radius`` bounds the center in the image metric:
    |A a - A center_ref| <= center_radius. Keeping the bound on A a (rather
    than on a) leaves the constraint small and well scaled even when eig_hi
    is loose."""

    eig_lo: float
    eig_hi: float
    alpha_lo: float
    alpha_hi: float
    center_ref: np.ndarray
    center_radius: float


_OK = ("optimal",)
_ACCEPTABLE = ("optimal", "optimal_inaccurate")


def solve_conic(prob: cp.Problem, solver: str = "CLARABEL") -> str:
    """Solve with a tight interior-point pass first, then progressively
    looser fallbacks. Returns the final status; raises on infeasibility or
    total failure."""
    attempts = []
    if solver in (None, "CLARABEL"):
        attempts = [
            ("CLARABEL", {"tol_gap_abs": 1e-11, "tol_gap_rel": 1e-11,
                          "tol_feas": 1e-11, "max_iter": 500}),
            ("CLARABEL", {}),
            ("SCS", {"eps": 1e-9, "max_iters": 200000}),
        ]
    elif solver == "SCS":
        attempts = [("SCS", {"eps": 1e-9, "max_iters": 200000})]
    else:
        attempts = [(solver, {})]

    last_exc = None
    inaccurate = None
    for name, kwargs in attempts:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                prob.solve(solver=getattr(cp, name), **kwargs)
        except (cp.error.SolverError, ValueError, ArithmeticError) as exc:
            last_exc = exc
            continue
        if prob.status in ("infeasible", "infeasible_inaccurate"):
            raise InfeasibleError("master problem infeasible within the "
                                  "parameter box")
        if prob.status in _OK and prob.value is not None:
            return prob.status
        if prob.status in _ACCEPTABLE and prob.value is not None:
            inaccurate = prob.status
    if inaccurate:
        return inaccurate
    raise NumericalError(f"conic solve failed: "
                         f"{last_exc if last_exc else prob.status}")


def profile_tangents(profile: AdmissibleProfile,
                     radii: Sequence[float]) -> list[tuple[float, float, float]]:
    """Supporting lines (t0, psi(t0), slope) of a convex profile; the
    symmetric secant at scale h is a valid subgradient between the one-sided
    derivatives."""
    out = []
    cap = profile.domain_bound
    for t0 in radii:
        t0 = float(t0)
        if t0 < 0 or (math.isfinite(cap) and t0 >= cap):
            continue
        h = max(1e-7, 1e-7 * t0)
        lo = max(t0 - h, 0.0)
        hi = t0 + h
        if math.isfinite(cap):
            hi = min(hi, cap * (1 - 1e-12))
        v0 = float(np.asarray(profile.eval(t0)))
        vl = float(np.asarray(profile.eval(lo)))
        vh = float(np.asarray(profile.eval(hi)))
        if not all(map(math.isfinite, (v0, vl, vh))) or hi <= lo:
            continue
        slope = (vh - vl) / (hi - lo)
        out.append((t0, v0, slope))
    return out


def _psi_constraint(profile: AdmissibleProfile, v, rhs, cons: list,
                    tangents: Optional[Sequence[tuple[float, float, float]]]):
    """Append conic constraints equivalent to psi(|v|) <= rhs."""
    s = profile.s
    if s is not None:
        if s == 0:
            cons.append(cp.norm(v) <= rhs)
            return
        if math.isinf(s):
            cons.append(cp.sum_squares(v) <= rhs)
            return
        # q = (s/2)(w - 1) for w = sqrt(1 + (2t/s)^2); q stays O(1) in the
        # active range for every s, unlike w - 1 which collapses like s^-2
        q = cp.Variable(nonneg=True)
        half = 0.5 * s
        cons.append(cp.norm(cp.hstack([cp.Constant([half]), v])) <= half + q)
        cons.append(q - half * cp.log(1 + q / s) <= rhs)
        return
    nrm = cp.norm(v)
    if profile.pieces is not None:
        for slope, icpt in profile.pieces:
            cons.append(slope * nrm + icpt <= rhs)
        if math.isfinite(profile.domain_bound):
            cons.append(nrm <= profile.domain_bound)
        return
    if not tangents:
        raise SchemaError("generic profile requires supporting tangents")
    for t0, val, slope in tangents:
        cons.append(val + slope * (nrm - t0) <= rhs)
    if math.isfinite(profile.domain_bound):
        cons.append(nrm <= profile.domain_bound)


def _phi_constraint(f: LogDensity, y, rhs, cons: list,
                    cuts: Optional[Sequence[tuple[np.ndarray, float]]]):
    """Append conic constraints equivalent to phi_f(y) <= rhs for an affine
    vector expression y."""
    if isinstance(f, MinOfDensity):
        for part in f.parts:
            _phi_constraint(part, y, rhs, cons, cuts)
        return
    if isinstance(f, EllipsoidalDensity):
        a_mat = np.asarray(f.e.matrix)
        v = a_mat @ y - a_mat @ np.asarray(f.e.center)
        tangents = None
        if f.profile.s is None and f.profile.pieces is None:
            tangents = profile_tangents(f.profile, np.geomspace(1e-3, 50, 40))
        _psi_constraint(f.profile, v, rhs + math.log(f.e.height), cons,
                        tangents)
        return
    if isinstance(f, GaussianDensity):
        a_mat = np.asarray(f.e.matrix)
        v = a_mat @ y - a_mat @ np.asarray(f.e.center)
        cons.append(cp.sum_squares(v) <= rhs + math.log(f.e.height))
        return
    if isinstance(f, GaugePowerDensity):
        t = cp.Variable(nonneg=True)
        normals = np.asarray(f._normals)
        offsets = np.asarray(f._offsets)
        for j in range(normals.shape[0]):
            cons.append((normals[j] @ y) / offsets[j] <= t)
        cons.append(cp.power(t, f.p) <= rhs + math.log(f.height))
        return
    if isinstance(f, HeightDensity):
        inv = np.asarray(f._inv)
        z = inv @ y - inv @ np.asarray(f.e.center)
        la = math.log(f.e.height)
        if math.isinf(f.s):
            cons.append(la + cp.sum_squares(z) <= rhs)
        elif f.s == 0:
            cons.append(cp.sum_squares(z) <= 1)
            cons.append(cp.Constant(la) <= rhs)
        else:
            cons.append(la - 0.5 * f.s * cp.log(1 - cp.sum_squares(z)) <= rhs)
        return
    # unstructured: affine minorants w . y - c <= phi(y)
    if cuts is None or len(cuts) == 0:
        raise SchemaError(f"density kind {f.kind!r} needs Fenchel cuts in the "
                          "inscribed master")
    for w_vec, c in cuts:
        cons.append(np.asarray(w_vec) @ y - float(c) <= rhs)


def _box_constraints(a_var, box: ParameterBox, d: int) -> list:
    eye = np.eye(d)
    return [a_var >> box.eig_lo * eye, a_var << box.eig_hi * eye]


def lowner_master(points: np.ndarray, phis: np.ndarray,
                  profile: AdmissibleProfile, box: ParameterBox,
                  solver: str = "CLARABEL",
                  tangents: Optional[Sequence[tuple[float, float, float]]] = None,
                  center_target: Optional[np.ndarray] = None,
                  objective_cap: Optional[float] = None,
                  norm_caps: Optional[Sequence[tuple[np.ndarray, float]]] = None):
    """One covering-side master solve.

    ``norm_caps`` rows enforce |A v| <= bound, the asymptotic-growth
    comparison along ray v; they pin slope-active optima that point
    constraints alone approach only as sampled radii grow. With
    ``objective_cap`` set, minimizes distance of the implied center to
    ``center_target`` subject to the usual constraints plus objective <= cap
    (used to walk along an optimal face). Returns (A, b, mu, objective,
    status)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = points.shape[1]
    a_var = cp.Variable((d, d), symmetric=True)
    b_var = cp.Variable(d)
    mu = cp.Variable()
    cons = _box_constraints(a_var, box, d)
    cons.append(mu >= math.log(box.alpha_lo))
    cons.append(mu <= math.log(box.alpha_hi))
    cons.append(cp.norm(b_var - a_var @ np.asarray(box.center_ref))
                <= box.center_radius)
    for v, bound in (norm_caps or []):
        if math.isfinite(bound):
            cons.append(cp.norm(a_var @ np.asarray(v)) <= bound)
    for x, p in zip(points, np.asarray(phis, dtype=float)):
        if math.isfinite(p):
            _psi_constraint(profile, a_var @ x - b_var, mu + p, cons, tangents)
    base_obj = mu - cp.log_det(a_var)
    if objective_cap is None:
        prob = cp.Problem(cp.Minimize(base_obj), cons)
    else:
        cons.append(base_obj <= objective_cap)
        prob = cp.Problem(
            cp.Minimize(cp.norm(b_var - a_var @ np.asarray(center_target))),
            cons)
    status = solve_conic(prob, solver)
    a_val = 0.5 * (a_var.value + a_var.value.T)
    mu_val = float(mu.value)
    obj = mu_val - float(np.linalg.slogdet(a_val)[1])
    return a_val, np.asarray(b_var.value, dtype=float), mu_val, obj, status


def bounded_parts(f: LogDensity) -> list[tuple[np.ndarray, np.ndarray, float]]:
    """Linear descriptions (M, a, tau) with supp(part) = {|M(x-a)| <= tau}
    for every bounded-support structured part of f."""
    if isinstance(f, MinOfDensity):
        out = []
        for p in f.parts:
            out.extend(bounded_parts(p))
        return out
    if isinstance(f, EllipsoidalDensity) and math.isfinite(f.profile.domain_bound):
        return [(np.asarray(f.e.matrix), np.asarray(f.e.center),
                 float(f.profile.domain_bound))]
    if isinstance(f, HeightDensity) and not math.isinf(f.s):
        return [(np.linalg.inv(f.e.matrix), np.asarray(f.e.center), 1.0)]
    return []


def john_master(u_points: np.ndarray, f: LogDensity, s: float,
                box: ParameterBox, solver: str = "CLARABEL",
                cuts: Optional[Sequence[tuple[np.ndarray, float]]] = None,
                support_dirs: Optional[Sequence[np.ndarray]] = None):
    """One inscribed-side master solve over (A, beta); center pinned at the
    origin. Returns (A, beta, objective, status)."""
    u_points = np.atleast_2d(np.asarray(u_points, dtype=float))
    d = u_points.shape[1]
    a_var = cp.Variable((d, d), symmetric=True)
    beta = cp.Variable()
    cons = _box_constraints(a_var, box, d)
    cons.append(beta >= math.log(box.alpha_lo))
    cons.append(beta <= math.log(box.alpha_hi))
    for u in u_points:
        eta = float(eta_s(s, float(np.linalg.norm(u))))
        if not math.isfinite(eta):
            continue
        _phi_constraint(f, a_var @ u, beta + eta, cons, cuts)
    for m_mat, a_c, tau in bounded_parts(f):
        for w in (support_dirs or []):
            cons.append(cp.norm(m_mat @ (a_var @ np.asarray(w))
                                - m_mat @ a_c) <= tau)
    prob = cp.Problem(cp.Minimize(beta - cp.log_det(a_var)), cons)
    status = solve_conic(prob, solver)
    a_val = 0.5 * (a_var.value + a_var.value.T)
    beta_val = float(beta.value)
    obj = beta_val - float(np.linalg.slogdet(a_val)[1])
    return a_val, beta_val, obj, status
