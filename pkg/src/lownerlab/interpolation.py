"""Explicit constructions on covering triples: interpolation and the two
sausage shrink constructions used to rule out split covers.

All three take covering triples and produce a new triple that still dominates
the relevant data but with a strictly smaller integral (interpolation: not
larger, equal only when the matrices agree).
"""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize
from scipy.linalg import sqrtm

from .core import AdmissibleProfile, DEllipsoid
from .errors import SchemaError

__all__ = ["interpolate", "sausage_increasing", "sausage_bounded"]


def interpolate(e1: DEllipsoid, e2: DEllipsoid, beta1: float) -> DEllipsoid:
    """Geometric interpolation of two triples with weights (beta1, 1 - beta1):

        A = b1 A1 + b2 A2,  alpha = alpha1^b1 alpha2^b2,
        a = A^{-1} (b1 A1 a1 + b2 A2 a2).

    The result dominates ell_1^b1 ell_2^b2 pointwise and its integral is at
    most the geometric mean of the two integrals, with equality iff A1 = A2.
    """
    if not 0.0 < beta1 < 1.0:
        raise SchemaError(f"beta1 must lie in (0, 1), got {beta1}")
    if e1.dim != e2.dim:
        raise SchemaError("dimension mismatch")
    b1, b2 = float(beta1), 1.0 - float(beta1)
    a_mat = b1 * np.asarray(e1.matrix) + b2 * np.asarray(e2.matrix)
    height = e1.height ** b1 * e2.height ** b2
    rhs = b1 * np.asarray(e1.matrix) @ e1.center + b2 * np.asarray(e2.matrix) @ e2.center
    center = np.linalg.solve(a_mat, rhs)
    return DEllipsoid(a_mat, height, center)


def _sausage_normalize(a1, a2, d: int):
    a1 = np.asarray(a1, dtype=float).reshape(-1)
    a2 = np.asarray(a2, dtype=float).reshape(-1)
    if a1.shape[0] != d or a2.shape[0] != d:
        raise SchemaError("center dimension mismatch")
    if float(np.linalg.norm(a1 - a2)) <= 1e-14 * (1.0 + float(np.linalg.norm(a1))):
        raise SchemaError("the two centers must differ")
    m = 0.5 * (a1 + a2)
    return a1, a2, m


def sausage_increasing(profile: AdmissibleProfile, a_mat, alpha: float,
                       a1, a2, grid_budget: int = 4096) -> DEllipsoid:
    """Shrink construction for a strictly increasing full-domain profile.

    For the two translates ell_i = alpha exp(-psi(|A(x - a_i)|)) it returns
    E = ((1 - eps) A, alpha e^{-2 d eps}, midpoint) with

        eps1 = (1/2d) inf { psi(|y + a|) - psi(|y|) :
                            <y, a> >= 0, psi(|y|) <= 2d },
        eps  = min(eps1, 1) / 2,

    where a = -A (a1 - midpoint). The infimum runs over a compact half-ball
    and is found by a (radius, cosine) grid plus local refinement; it is
    positive exactly because psi increases strictly, and eps1 below 1e-12 is
    rejected as a hypothesis failure. The result dominates min(ell_1, ell_2)
    with integral shrink factor e^{-2 d eps} / (1 - eps)^d < 1.
    """
    a_mat = np.atleast_2d(np.asarray(a_mat, dtype=float))
    d = a_mat.shape[0]
    alpha = float(alpha)
    if not alpha > 0:
        raise SchemaError("alpha must be positive")
    if math.isfinite(profile.domain_bound):
        raise SchemaError("profile must have full domain [0, inf)")
    a1, a2, mid = _sausage_normalize(a1, a2, d)
    a_vec = -a_mat @ (a1 - mid)
    delta = float(np.linalg.norm(a_vec))

    level = 2.0 * d
    r0 = profile.inverse(level)

    def objective(t: float, u: float) -> float:
        r_shift = math.sqrt(max(t * t + 2.0 * t * delta * u + delta * delta, 0.0))
        return (float(np.asarray(profile.eval(r_shift)))
                - float(np.asarray(profile.eval(t))))

    if d == 1:
        ts = np.linspace(0.0, r0, max(64, grid_budget))
        vals = [objective(t, 1.0) for t in ts]
        k = int(np.argmin(vals))
        res = optimize.minimize_scalar(lambda t: objective(min(max(t, 0.0), r0), 1.0),
                                       bounds=(max(0.0, ts[k] - r0 / len(ts) * 2),
                                               min(r0, ts[k] + r0 / len(ts) * 2)),
                                       method="bounded",
                                       options={"xatol": 1e-12})
        inf_val = min(min(vals), float(res.fun))
    else:
        n = max(16, int(math.sqrt(grid_budget)))
        ts = np.linspace(0.0, r0, n)
        us = np.linspace(0.0, 1.0, n)
        grid_vals = np.array([[objective(t, u) for u in us] for t in ts])
        inf_val = float(grid_vals.min())
        order = np.argsort(grid_vals, axis=None)[:4]
        for flat in order:
            i, j = np.unravel_index(flat, grid_vals.shape)

            def neg(p):
                t = min(max(p[0], 0.0), r0)
                u = min(max(p[1], 0.0), 1.0)
                return objective(t, u)

            res = optimize.minimize(neg, np.array([ts[i], us[j]]),
                                    method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-14,
                                             "maxfev": 2000})
            inf_val = min(inf_val, float(res.fun))

    eps1 = inf_val / (2.0 * d)
    if eps1 <= 1e-12:
        raise SchemaError("profile not strictly increasing at scale")
    eps = min(eps1, 1.0) / 2.0
    return DEllipsoid((1.0 - eps) * a_mat, alpha * math.exp(-2.0 * d * eps), mid)


def sausage_bounded(profile: AdmissibleProfile, a_mat, alpha: float,
                    a1, a2) -> DEllipsoid:
    """Shrink construction for a bounded-domain profile (domain [0, tau]).

    With a = -A (a1 - midpoint) and delta = |a|: when delta >= tau the two
    supports are disjoint and ((2A), alpha, midpoint) works (any factor above
    1 does); otherwise E = (S, alpha, midpoint) where S is the symmetric
    representative ((MA)^T (MA))^{1/2} of M A and M stretches by
    tau / (tau - delta) along a/|a|. S defines the same function as M A
    because only |M A x| enters, and det S = det M det A > det A, so the
    integral strictly drops.
    """
    a_mat = np.atleast_2d(np.asarray(a_mat, dtype=float))
    d = a_mat.shape[0]
    alpha = float(alpha)
    if not alpha > 0:
        raise SchemaError("alpha must be positive")
    tau = profile.domain_bound
    if not math.isfinite(tau):
        raise SchemaError("profile must have a finite domain bound")
    a1, a2, mid = _sausage_normalize(a1, a2, d)
    a_vec = -a_mat @ (a1 - mid)
    delta = float(np.linalg.norm(a_vec))

    if delta >= tau:
        return DEllipsoid(2.0 * a_mat, alpha, mid)

    e_hat = a_vec / delta
    stretch = tau / (tau - delta)
    m_mat = np.eye(d) + (stretch - 1.0) * np.outer(e_hat, e_hat)
    b = m_mat @ a_mat
    s = sqrtm(b.T @ b)
    s = np.real_if_close(0.5 * (s + s.T), tol=1e8)
    return DEllipsoid(np.real(s), alpha, mid)
