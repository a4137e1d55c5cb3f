"""Centered minimum-volume enclosing ellipsoids and contact decompositions.

mvee_centered solves the D-optimal design dual by Fedorov-Wynn ascent with
away steps: maximize log det X(w), X(w) = sum w_i x_i x_i^T over the simplex.
The optimal M = X(w)^{-1}/d gives the minimal-volume centered ellipsoid
{x : x^T M x <= 1} containing the points, and the positive weights sit on
contact points (leverage x^T X^{-1} x = d).

The quadratic-profile covering of a gauge-squared density e^{-g_K(x)^2}
reduces to this exactly: alpha = 1 and {|Ax| <= 1} the centered MVEE of K,
since the domination |Ax|^2 <= g_K(x)^2 + log(alpha) along every scaled ray
forces |Ax| <= g_K(x) outright and the integral pi^{d/2} alpha / det A is
then minimized by the maximal det A.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .core import DEllipsoid
from .errors import NumericalError, SchemaError

__all__ = ["mvee_centered", "john_decomposition", "lowner_infty_of_gauge"]


def mvee_centered(points, tol: float = 1e-9, max_iter: int = 200000
                  ) -> np.ndarray:
    """PD matrix M with {x : x^T M x <= 1} the minimal-volume centered
    ellipsoid containing the points (equivalently their reflections too)."""
    x_arr = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = x_arr.shape
    if n < d or np.linalg.matrix_rank(x_arr) < d:
        raise SchemaError("points do not span the space; centered MVEE "
                          "is degenerate")
    w = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        xw = x_arr.T @ (w[:, None] * x_arr)
        try:
            sol = np.linalg.solve(xw, x_arr.T)
        except np.linalg.LinAlgError:
            raise NumericalError("design matrix became singular")
        g = np.einsum("ij,ji->i", x_arr, sol)
        j = int(np.argmax(g))
        g_max = float(g[j])
        support = w > 1e-14
        k = int(np.argmin(np.where(support, g, np.inf)))
        g_min = float(g[k])
        if g_max <= d * (1.0 + tol) and g_min >= d * (1.0 - tol):
            break
        if g_max - d >= d - g_min:
            lam = (g_max - d) / (d * (g_max - 1.0))
            w *= 1.0 - lam
            w[j] += lam
        else:
            theta = (d - g_min) / (d * (g_min - 1.0))
            theta = min(theta, w[k] / (1.0 - w[k]))
            w *= 1.0 + theta
            w[k] -= theta
            w = np.maximum(w, 0.0)
        w /= w.sum()
    else:
        raise NumericalError("centered MVEE did not reach the requested "
                             "dual gap")
    xw = x_arr.T @ (w[:, None] * x_arr)
    m_mat = np.linalg.inv(xw) / d
    return 0.5 * (m_mat + m_mat.T)


def john_decomposition(points, m_mat: np.ndarray, tol: float = 1e-7
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Contact unit vectors u_i = M^{1/2} x_i at touching points and
    nonnegative weights c_i with sum c_i u_i u_i^T = I."""
    x_arr = np.atleast_2d(np.asarray(points, dtype=float))
    m_mat = np.asarray(m_mat, dtype=float)
    d = m_mat.shape[0]
    lam, vec = np.linalg.eigh(0.5 * (m_mat + m_mat.T))
    if lam[0] <= 0:
        raise SchemaError("M must be positive definite")
    root = vec @ np.diag(np.sqrt(lam)) @ vec.T
    q = np.einsum("ij,jk,ik->i", x_arr, m_mat, x_arr)
    touch = q >= 1.0 - tol
    if not np.any(touch):
        raise SchemaError("no contact points at the given tolerance")
    u_vecs = (x_arr[touch] @ root.T)
    u_vecs = u_vecs / np.linalg.norm(u_vecs, axis=1, keepdims=True)

    # flatten symmetric outer products isometrically
    iu = np.triu_indices(d)
    scale = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    cols = []
    for u in u_vecs:
        outer = np.outer(u, u)
        cols.append(outer[iu] * scale)
    target = np.eye(d)[iu] * scale
    coef, _ = optimize.nnls(np.array(cols).T, target)
    return u_vecs, coef


def lowner_infty_of_gauge(vertices, d: int, tol: float = 1e-10) -> DEllipsoid:
    """Quadratic-profile covering of e^{-g_K^2} for K = conv(vertices):
    height 1 and matrix the square root of the centered MVEE form of K."""
    x_arr = np.atleast_2d(np.asarray(vertices, dtype=float))
    if x_arr.shape[1] != d:
        raise SchemaError(f"vertices have dimension {x_arr.shape[1]}, "
                          f"expected {d}")
    m_mat = mvee_centered(x_arr, tol=tol)
    lam, vec = np.linalg.eigh(m_mat)
    root = vec @ np.diag(np.sqrt(lam)) @ vec.T
    return DEllipsoid(root, 1.0, np.zeros(d))
