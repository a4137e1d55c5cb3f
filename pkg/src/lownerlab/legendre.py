"""Log-conjugation for radial log-concave functions and duality verifiers.

For a profile psi the monotone conjugate is psi~(r) = sup_{t>=0} (r t - psi(t));
for radial phi(x) = psi(|x|) the full Legendre transform reduces to
phi*(y) = psi~(|y|), which keeps every d-dimensional conjugation here a 1-D
concave maximization.

The dual height function of a triple E = (A, alpha, a) is

    h_{s,E}(x) = (1/alpha) (1 - |A^{-1}(x-a)|^2)^{s/2}   on A B^d + a,

with the indicator (s = 0) and Gaussian (s = inf) variants. For centered E and
finite s the polar of h_{s,E} is exactly the profile-ellipsoidal function with
the same triple; at s = inf Gaussian polarity rescales the matrix by 1/2
(exp(-|x|^2) and exp(-|y|^2/4) are polar to each other), so the s = inf check
compares against the triple (A/2, alpha, 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .core import (INF, AdmissibleProfile, DEllipsoid, EllipsoidalDensity,
                   GaussianDensity, HeightDensity, LogDensity,
                   check_admissible, sphere_directions)
from .errors import SchemaError
from .integrals import QuadratureSpec, unit_ball_volume, v_psi
from .psi_family import profile_of, psi_s_eval

__all__ = [
    "RadialProfilePair",
    "legendre_profile",
    "h_eval",
    "duality_check",
    "mahler_identity_check",
    "NumericPolarDensity",
    "polar_density",
    "eta_s",
]


def eta_s(s: float, t):
    """-(s/2) log(1 - t^2) on [0, 1): the monotone conjugate of psi_s.

    s = 0 gives 0 on [0, 1] (inf beyond); s = inf gives t^2 on [0, inf).
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if math.isinf(s):
        out = t * t
    elif s == 0:
        out = np.where(t <= 1.0, 0.0, INF)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t < 1.0, -0.5 * s * np.log1p(-np.minimum(t * t, 1.0 - 1e-300)), INF)
    return float(out[0]) if scalar else out


def _sup_rt_minus(fn, r: float, cap: float) -> float:
    """sup_{t in [0, cap]} (r t - fn(t)) for concave maximand; INF when the
    doubling bracket escapes past 1e12."""
    if r <= 0:
        return 0.0

    def m(t):
        v = float(np.asarray(fn(t)))
        return r * t - v if math.isfinite(v) else -1e300

    hard_cap = cap if math.isfinite(cap) else 1e12
    hi = min(1.0, hard_cap)
    while hi < hard_cap and m(2.0 * hi) > m(hi) + 1e-300:
        hi *= 2.0
        if hi > 1e12 and not math.isfinite(cap):
            return INF
    hi = min(2.0 * hi, hard_cap)
    res = optimize.minimize_scalar(lambda t: -m(t), bounds=(0.0, hi),
                                   method="bounded",
                                   options={"xatol": 1e-12})
    best = -float(res.fun)
    # the supremum may sit at the domain edge itself (finite jump there)
    for t_edge in (hi * (1.0 - 1e-13), hi):
        best = max(best, m(t_edge))
    return max(best, 0.0)


def legendre_profile(profile: AdmissibleProfile,
                     grid: Optional[np.ndarray] = None) -> AdmissibleProfile:
    """Monotone conjugate psi~(r) = sup_{t>=0} (r t - psi(t)).

    The maximand is concave in t; each evaluation brackets by doubling and
    finishes with bounded scalar maximization (1e-12 in t). Arguments past the
    primal growth slope give the +inf sentinel. When ``grid`` is supplied the
    result is admissibility-checked on it.
    """
    cap = profile.domain_bound

    def dual_eval(r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        rr = np.atleast_1d(r)
        out = np.array([_sup_rt_minus(profile.eval, float(x), cap) for x in rr])
        return float(out[0]) if scalar else out

    # a positive slope of psi at 0 makes the dual flat on [0, slope]
    probe = float(np.asarray(profile.eval(1e-7)))
    strict = probe / 1e-7 < 1e-6 if math.isfinite(probe) else False
    dual = AdmissibleProfile(
        eval=dual_eval,
        domain_bound=profile.growth_slope,
        growth_slope=profile.domain_bound if math.isfinite(profile.domain_bound) else INF,
        strictly_increasing=strict,
        name=f"dual[{profile.name}]",
    )
    if grid is not None:
        check_admissible(dual, np.asarray(grid, dtype=float))
    return dual


@dataclass(frozen=True)
class RadialProfilePair:
    """A profile together with its monotone conjugate.

    ``from_profile`` verifies biconjugacy psi** = psi on the grid (interior of
    the domain) within 1e-8.
    """

    primal: AdmissibleProfile
    dual: AdmissibleProfile

    @classmethod
    def from_profile(cls, profile: AdmissibleProfile,
                     grid: Optional[np.ndarray] = None) -> "RadialProfilePair":
        dual = legendre_profile(profile)
        if grid is None:
            hi = profile.domain_bound if math.isfinite(profile.domain_bound) else 10.0
            grid = np.linspace(0.0, hi * (1.0 - 1e-9), 41)
        grid = np.asarray(grid, dtype=float)
        bidual = legendre_profile(dual)
        p = np.asarray(profile.eval(grid), dtype=float)
        q = np.asarray(bidual.eval(grid), dtype=float)
        inside = np.isfinite(p) & (grid < profile.domain_bound * (1.0 - 1e-12)
                                   if math.isfinite(profile.domain_bound)
                                   else np.isfinite(p))
        resid = np.max(np.abs(p[inside] - q[inside])) if np.any(inside) else 0.0
        if resid > 1e-8 * (1.0 + float(np.max(np.abs(p[inside]), initial=0.0))):
            raise SchemaError(f"biconjugacy residual {resid:g} exceeds 1e-8")
        return cls(primal=profile, dual=dual)


def h_eval(s: float, e: DEllipsoid, x) -> float:
    """Dual height function value at x (vectorized over rows of x)."""
    if not (s >= 0 or math.isinf(s)):
        raise SchemaError(f"s must lie in [0, inf], got {s}")
    dens = HeightDensity(s, e)
    return dens.value(x)


def _default_dual_grid(e: DEllipsoid, seed: int = 3) -> np.ndarray:
    d = e.dim
    dirs = sphere_directions(d, 16, seed, [np.asarray(e.matrix)])
    radii = np.concatenate([[0.0], np.geomspace(1e-3, 30.0, 40)])
    pts = [r * u for u in dirs for r in radii]
    return np.array(pts)


def duality_check(s: float, e: DEllipsoid,
                  grid: Optional[np.ndarray] = None) -> float:
    """Sup-norm residual between the numerical polar of h_{s,E} and its
    closed-form partner, for centered E.

    The polar is computed by 1-D concave maximization of t r - eta_s(t) per
    grid point (independent of the psi_s closed form). Finite s compares
    against the triple (A, alpha, 0); s = inf compares against (A/2, alpha, 0)
    by Gaussian polarity.
    """
    if float(np.linalg.norm(e.center)) > 1e-12:
        raise SchemaError("duality_check requires a centered triple")
    if grid is None:
        grid = _default_dual_grid(e)
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.shape[1] != e.dim:
        raise SchemaError("grid dimension does not match the triple")

    a_mat = np.asarray(e.matrix)
    cap = 1.0 if not math.isinf(s) else INF
    worst = 0.0
    for y in pts:
        r = float(np.linalg.norm(a_mat @ y))
        sup = _sup_rt_minus(lambda t: eta_s(s, t), r, cap)
        num = e.height * math.exp(-sup)
        if math.isinf(s):
            expected = e.height * math.exp(-psi_s_eval(s, 0.5 * r))
        else:
            expected = e.height * math.exp(-psi_s_eval(s, r))
        worst = max(worst, abs(num - expected))
    return worst


# ---------------------------------------------------------------------------
# Mahler product identity


def _ell_integral_quad(s: float, e: DEllipsoid) -> float:
    """Integral of alpha exp(-psi_s(|A(x-a)|)) by direct quadrature in the
    original coordinates (no determinant shortcut)."""
    d = e.dim
    a_mat = np.asarray(e.matrix)
    lam_min = float(np.linalg.eigvalsh(a_mat)[0])
    prof = profile_of(s)
    # |A(x-a)| >= lam_min |x-a|; pick T so the profile value at the edge ~ 45
    t_rad = prof.inverse(45.0) / lam_min
    c = np.asarray(e.center)
    if d == 1:
        val, _ = integrate.quad(
            lambda x: e.height * math.exp(-float(psi_s_eval(s, abs(a_mat[0, 0] * (x - c[0]))))),
            c[0] - t_rad, c[0] + t_rad, limit=200, epsabs=1e-12, epsrel=1e-10)
        return val
    if d != 2:
        raise SchemaError("direct quadrature implemented for d <= 2")

    def f(y, x):
        r = float(np.linalg.norm(a_mat @ (np.array([x, y]) - c)))
        p = float(psi_s_eval(s, r))
        return e.height * math.exp(-p) if p < 700 else 0.0

    val, _ = integrate.dblquad(f, c[0] - t_rad, c[0] + t_rad,
                               lambda x: c[1] - t_rad, lambda x: c[1] + t_rad,
                               epsabs=1e-11, epsrel=1e-9)
    return val


def _h_integral_quad(s: float, e: DEllipsoid) -> float:
    """Integral of h_{s,E} by direct quadrature with exact section limits."""
    d = e.dim
    c = np.asarray(e.center)
    if math.isinf(s):
        inv = np.linalg.inv(e.matrix)
        lam = float(np.linalg.eigvalsh(inv)[0])
        t_rad = math.sqrt(45.0) / lam
        if d == 1:
            val, _ = integrate.quad(
                lambda x: math.exp(-(inv[0, 0] * (x - c[0])) ** 2) / e.height,
                c[0] - t_rad, c[0] + t_rad, limit=200, epsabs=1e-12, epsrel=1e-10)
            return val
        if d != 2:
            raise SchemaError("direct quadrature implemented for d <= 2")

        def g(y, x):
            u = inv @ (np.array([x, y]) - c)
            return math.exp(-float(u @ u)) / e.height

        val, _ = integrate.dblquad(g, c[0] - t_rad, c[0] + t_rad,
                                   lambda x: c[1] - t_rad, lambda x: c[1] + t_rad,
                                   epsabs=1e-11, epsrel=1e-9)
        return val

    if d == 1:
        half = float(e.matrix[0, 0])

        def g1(x):
            u = (x - c[0]) / half
            q = 1.0 - u * u
            if q <= 0:
                return 0.0
            return q ** (s / 2.0) / e.height

        val, _ = integrate.quad(g1, c[0] - half, c[0] + half, limit=200,
                                epsabs=1e-12, epsrel=1e-10)
        return val
    if d != 2:
        raise SchemaError("direct quadrature implemented for d <= 2")

    # section limits of {(x-c)^T M (x-c) <= 1}, M = A^{-2}
    inv = np.linalg.inv(e.matrix)
    m = inv @ inv
    x_half = math.sqrt(m[1, 1] / (m[0, 0] * m[1, 1] - m[0, 1] ** 2))

    def y_lims(x):
        dx = x - c[0]
        disc = m[1, 1] - (m[0, 0] * m[1, 1] - m[0, 1] ** 2) * dx * dx
        disc = max(disc, 0.0)
        root = math.sqrt(disc)
        return (c[1] + (-m[0, 1] * dx - root) / m[1, 1],
                c[1] + (-m[0, 1] * dx + root) / m[1, 1])

    def g2(y, x):
        v = np.array([x, y]) - c
        q = 1.0 - float(v @ m @ v)
        if q <= 0:
            return 0.0
        return q ** (s / 2.0) / e.height

    val, _ = integrate.dblquad(g2, c[0] - x_half, c[0] + x_half,
                               lambda x: y_lims(x)[0], lambda x: y_lims(x)[1],
                               epsabs=1e-11, epsrel=1e-9)
    return val


def _ball_side_product(s: float, d: int) -> float:
    """Product integral for the unit triple by radial quadrature."""
    prof = profile_of(s)
    ell = v_psi(prof, d, QuadratureSpec())
    if math.isinf(s):
        h_rad, _ = integrate.quad(lambda t: t ** (d - 1) * math.exp(-t * t),
                                  0.0, 8.0, limit=200, epsabs=1e-13,
                                  epsrel=1e-11)
    else:
        h_rad, _ = integrate.quad(
            lambda t: t ** (d - 1) * (max(1.0 - t * t, 0.0)) ** (s / 2.0),
            0.0, 1.0, limit=200, epsabs=1e-13, epsrel=1e-11)
    h = d * unit_ball_volume(d) * h_rad
    return ell * h


def mahler_identity_check(s: float, e: DEllipsoid) -> float:
    """Relative residual of the product identity

        int h_E * int ell_E  =  int h_B * int ell_B   (B the unit triple),

    with the E side integrated directly in the original coordinates and the
    B side by radial quadrature."""
    if not (s >= 0 or math.isinf(s)):
        raise SchemaError(f"s must lie in [0, inf], got {s}")
    left = _h_integral_quad(s, e) * _ell_integral_quad(s, e)
    right = _ball_side_product(s, e.dim)
    return abs(left - right) / abs(right)


# ---------------------------------------------------------------------------
# polar densities


@dataclass(frozen=True)
class NumericPolarDensity(LogDensity):
    """Polar of an even density, evaluated by per-point conjugation.

    phi_polar(y) = sup_x (<x, y> - phi_base(x)), computed by a ray prescan
    along y followed by simplex polish. Evenness of the base keeps the mode of
    the polar at the origin with sup-norm 1 / sup-norm(base).
    """

    base: LogDensity

    kind = "polar"

    def __post_init__(self):
        if not self.base.is_even():
            raise SchemaError("numeric polar requires an even base density")

    @property
    def dimension(self) -> int:
        return self.base.dimension

    @property
    def sup_norm(self) -> float:
        return 1.0 / self.base.sup_norm

    @property
    def mode(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def phi_and_argmax(self, y: np.ndarray) -> tuple[float, np.ndarray]:
        y = np.asarray(y, dtype=float).reshape(-1)
        d = self.dimension
        base = self.base

        def g(x):
            p = float(np.asarray(base.phi(x)))
            if not math.isfinite(p):
                return -1e300
            return float(x @ y) - p

        ny = float(np.linalg.norm(y))
        u = y / ny if ny > 1e-14 else np.eye(d)[0]
        # concave along the ray; bracket by doubling
        def mray(t):
            return g(t * u)

        hi = 1.0
        cap = base.support_radius()
        hard = cap if math.isfinite(cap) else 1e9
        while hi < hard and mray(2.0 * hi) > mray(hi) + 1e-300:
            hi *= 2.0
            if hi > 1e9 and not math.isfinite(cap):
                return INF, hi * u
        hi = min(2.0 * hi, hard)
        res = optimize.minimize_scalar(lambda t: -mray(t), bounds=(0.0, hi),
                                       method="bounded",
                                       options={"xatol": 1e-12})
        best_t = float(res.x)
        best_x = best_t * u
        best_v = -float(res.fun)
        edge = mray(hi * (1.0 - 1e-13))
        if edge > best_v:
            best_v, best_x = edge, hi * (1.0 - 1e-13) * u
        if d == 1:
            # evenness puts the maximizer on the ray itself
            return best_v, best_x
        starts = [best_x] + [np.asarray(cc, dtype=float) for cc in base.centers()]
        for s0 in starts:
            r = optimize.minimize(lambda x: -g(x), s0, method="Nelder-Mead",
                                  options={"xatol": 1e-12, "fatol": 1e-14,
                                           "maxfev": 600})
            if -float(r.fun) > best_v:
                best_v, best_x = -float(r.fun), np.asarray(r.x, dtype=float)
        return best_v, best_x

    def phi(self, x):
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        single = np.asarray(x).ndim == 1
        out = np.array([self.phi_and_argmax(row)[0] for row in pts])
        return float(out[0]) if single else out

    def tail_slope(self, v):
        if not self.base.support_bounded():
            return INF
        # asymptotically linear with slope = support function of the base
        # support; a secant at large t measures it from below
        v = np.asarray(v, dtype=float)
        t1, t2 = 64.0, 128.0
        p1 = self.phi_and_argmax(t1 * v)[0]
        p2 = self.phi_and_argmax(t2 * v)[0]
        if math.isinf(p2):
            return INF
        return max(0.0, (p2 - p1) / (t2 - t1))

    def quad_rate(self, v):
        if self.support_bounded():
            return INF
        v = np.asarray(v, dtype=float)
        t1, t2 = 64.0, 128.0
        p1 = self.phi_and_argmax(t1 * v)[0] - math.log(self.base.sup_norm)
        p2 = self.phi_and_argmax(t2 * v)[0] - math.log(self.base.sup_norm)
        if math.isinf(p2):
            return INF
        r1, r2 = p1 / t1 ** 2, p2 / t2 ** 2
        return max(0.0, min(r1, r2))

    def support_bounded(self):
        # the polar has bounded support iff the base decays linearly in
        # every direction
        dirs = sphere_directions(self.dimension, 16, 5,
                                 self.base.structure_matrices(),
                                 self.base.structure_directions())
        return all(math.isfinite(self.base.tail_slope(u)) for u in dirs)

    def support_radius(self):
        dirs = sphere_directions(self.dimension, 16, 5,
                                 self.base.structure_matrices(),
                                 self.base.structure_directions())
        slopes = [self.base.tail_slope(u) for u in dirs]
        if any(math.isinf(sl) for sl in slopes):
            return INF
        return max(slopes) * (1.0 + 1e-9)

    def centers(self):
        return [self.mode]

    def structure_matrices(self):
        return [np.linalg.inv(m) for m in self.base.structure_matrices()]


def polar_density(f: LogDensity) -> LogDensity:
    """Structured polar when a closed form exists, numeric polar otherwise.

    Closed pairs (centered triples only): profile-ellipsoidal with psi_s <->
    height function with the same triple (finite s); the s = inf pairs pick up
    the Gaussian factor-2 matrix rescaling; Gaussians map to Gaussians with
    matrix A^{-1}/2 and height 1/alpha.
    """
    d = f.dimension
    centered = float(np.linalg.norm(np.asarray(f.mode))) <= 1e-12

    if centered and isinstance(f, EllipsoidalDensity) and f.profile.s is not None:
        s = f.profile.s
        if math.isinf(s):
            e2 = DEllipsoid(2.0 * np.asarray(f.e.matrix), f.e.height, np.zeros(d))
            return HeightDensity(INF, e2)
        return HeightDensity(s, f.e)
    if centered and isinstance(f, GaussianDensity):
        inv = np.linalg.inv(f.e.matrix)
        return GaussianDensity(DEllipsoid(0.5 * inv, 1.0 / f.e.height, np.zeros(d)))
    if centered and isinstance(f, HeightDensity):
        if math.isinf(f.s):
            half = DEllipsoid(0.5 * np.asarray(f.e.matrix), f.e.height, np.zeros(d))
            return GaussianDensity(half)
        return EllipsoidalDensity(profile_of(f.s), f.e)
    return NumericPolarDensity(f)
