"""Domain types and the two fundamental evaluation formulas.

The central objects:

* ``DEllipsoid`` -- the parameter triple (A, alpha, a) of a profile-ellipsoidal
  function ell(x) = alpha * exp(-psi(|A(x - a)|)).
* ``AdmissibleProfile`` -- a convex nondecreasing profile psi on [0, inf) with
  psi(0) = 0, divergent at the domain boundary.
* ``LogDensity`` -- structured descriptions of proper log-concave functions
  f = exp(-phi), one subclass per kind, each carrying exact sup-norm, mode and
  tail metadata so that violation searches can exploit structure.
* ``is_below`` -- certificate-producing test of the relation f <= ell.

All types are immutable after construction; operations are pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .errors import SchemaError

__all__ = [
    "DEllipsoid",
    "AdmissibleProfile",
    "indicator_profile",
    "flat_bottom_profile",
    "check_admissible",
    "LogDensity",
    "EllipsoidalDensity",
    "GaussianDensity",
    "GaugePowerDensity",
    "MinOfDensity",
    "CoverDensity",
    "HeightDensity",
    "Certificate",
    "SolveReport",
    "ellipsoidal_eval",
    "ellipsoidal_integral",
    "is_below",
    "violation_search",
]

INF = math.inf


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# parameter triple


@dataclass(frozen=True)
class DEllipsoid:
    """Parameter triple (matrix A, height alpha, center a).

    A must be symmetric positive-definite (relative symmetry residual at most
    1e-12; the stored matrix is the symmetrized copy), alpha > 0.
    """

    matrix: np.ndarray
    height: float
    center: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if a.shape[0] != a.shape[1]:
            raise SchemaError(f"matrix must be square, got shape {a.shape}")
        scale = max(float(np.abs(a).max()), 1e-300)
        if float(np.abs(a - a.T).max()) > 1e-12 * scale:
            raise SchemaError("matrix is not symmetric within 1e-12 relative")
        a = 0.5 * (a + a.T)
        eigs = np.linalg.eigvalsh(a)
        if eigs[0] <= 0:
            raise SchemaError(f"matrix is not positive-definite (min eig {eigs[0]:g})")
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if c.shape[0] != a.shape[0]:
            raise SchemaError("center dimension does not match matrix")
        if not (float(self.height) > 0 and math.isfinite(float(self.height))):
            raise SchemaError(f"height must be positive finite, got {self.height}")
        object.__setattr__(self, "matrix", _readonly(a))
        object.__setattr__(self, "center", _readonly(c))
        object.__setattr__(self, "height", float(self.height))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def inv(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class AdmissibleProfile:
    """Convex nondecreasing profile psi with psi(0) = 0.

    ``eval`` is vectorized: it accepts scalars or arrays of t >= 0 and returns
    values in [0, inf]; beyond ``domain_bound`` it returns inf. ``growth_slope``
    is lim psi(t)/t (inf for superlinear profiles and for bounded domains).
    ``pieces`` optionally lists (slope, intercept) pairs when psi is exactly
    max_i(slope_i * t + intercept_i) on its domain. ``s`` marks members of the
    interpolation family psi_s (math.inf for the quadratic endpoint).
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain_bound: float
    growth_slope: float
    strictly_increasing: bool
    pieces: Optional[tuple[tuple[float, float], ...]] = None
    s: Optional[float] = None
    name: str = "profile"

    def __call__(self, t):
        return self.eval(t)

    def inverse(self, level: float) -> float:
        """Smallest t with psi(t) >= level (level > 0), by bisection."""
        if level <= 0:
            return 0.0
        lo, hi = 0.0, 1.0
        cap = self.domain_bound if math.isfinite(self.domain_bound) else 1e12
        for _ in range(400):
            if hi >= cap or float(self.eval(min(hi, cap * (1 - 1e-15)))) >= level:
                break
            hi *= 2.0
        hi = min(hi, cap)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            v = float(self.eval(mid))
            if v >= level:
                hi = mid
            else:
                lo = mid
        return hi


def indicator_profile(tau: float) -> AdmissibleProfile:
    """psi = 0 on [0, tau], +inf beyond: the indicator-generating profile."""
    if not tau > 0:
        raise SchemaError("tau must be positive")

    def ev(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= tau, 0.0, INF)
        return out if out.ndim else float(out)

    return AdmissibleProfile(ev, float(tau), INF, False, pieces=((0.0, 0.0),),
                             name=f"indicator[{tau:g}]")


def flat_bottom_profile(tau: float, slope: float = 1.0) -> AdmissibleProfile:
    """psi(t) = max(0, slope * (t - tau)): flat on [0, tau], then linear."""
    if not (tau > 0 and slope > 0):
        raise SchemaError("tau and slope must be positive")

    def ev(t):
        t = np.asarray(t, dtype=float)
        out = np.maximum(0.0, slope * (t - tau))
        return out if out.ndim else float(out)

    return AdmissibleProfile(ev, INF, float(slope), False,
                             pieces=((0.0, 0.0), (slope, -slope * tau)),
                             name=f"flat[{tau:g}]+{slope:g}t")


def check_admissible(profile: AdmissibleProfile, grid: Optional[np.ndarray] = None,
                     raise_on_fail: bool = True) -> bool:
    """Grid checks: psi(0)=0, nondecreasing, midpoint convexity (1e-10 abs),
    divergence toward the domain boundary."""
    if grid is None:
        hi = profile.domain_bound if math.isfinite(profile.domain_bound) else 100.0
        grid = np.concatenate([[0.0], np.geomspace(1e-6, hi * (1 - 1e-9), 400)])
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(profile.eval(grid), dtype=float)
    ok = True
    msgs = []
    if abs(float(profile.eval(0.0))) > 1e-12:
        ok, msgs = False, msgs + ["psi(0) != 0"]
    finite = np.isfinite(vals)
    v = vals[finite]
    g = grid[finite]
    if np.any(np.diff(v) < -1e-12 * np.maximum(1.0, np.abs(v[:-1]))):
        ok, msgs = False, msgs + ["not nondecreasing"]
    if len(g) >= 3:
        t1, t2, t3 = g[:-2], g[1:-1], g[2:]
        lam = (t2 - t1) / (t3 - t1)
        interp = (1 - lam) * v[:-2] + lam * v[2:]
        if np.any(v[1:-1] > interp + 1e-10):
            ok, msgs = False, msgs + ["midpoint convexity violated"]
    if math.isfinite(profile.domain_bound):
        edge = profile.domain_bound
        near = float(np.asarray(profile.eval(edge * (1 - 1e-12))))
        beyond = float(np.asarray(profile.eval(edge * (1 + 1e-9))))
        if not (beyond == INF or near > 1e2):
            # bounded-domain profiles diverge at tau or jump to +inf after it
            if beyond != INF:
                ok, msgs = False, msgs + ["no divergence at domain bound"]
    else:
        if v[-1] < 10.0:
            big = float(np.asarray(profile.eval(g[-1] * 1e6)))
            if big < 10.0:
                ok, msgs = False, msgs + ["does not diverge at infinity"]
    if not ok and raise_on_fail:
        raise SchemaError("profile not admissible: " + "; ".join(msgs))
    return ok


# ---------------------------------------------------------------------------
# structured log-concave densities


class LogDensity:
    """Structured description of a proper log-concave f = exp(-phi).

    Subclasses provide vectorized ``phi`` (shape (..., d) -> (...)), exact
    ``sup_norm`` and ``mode``, and tail metadata used by search and solvers.
    """

    kind: str = "abstract"
    dimension: int
    sup_norm: float

    def phi(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value(self, x: np.ndarray) -> np.ndarray:
        p = np.asarray(self.phi(x), dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            out = np.exp(-p)
        return float(out) if out.ndim == 0 else out

    @property
    def mode(self) -> np.ndarray:
        raise NotImplementedError

    def is_even(self) -> bool:
        rng = np.random.default_rng(7)
        x = rng.standard_normal((64, self.dimension))
        r = 0.5 + 2.0 * rng.random(64)
        x = x / np.linalg.norm(x, axis=1, keepdims=True) * r[:, None]
        a, b = self.phi(x), self.phi(-x)
        both_inf = np.isinf(a) & np.isinf(b)
        with np.errstate(invalid="ignore"):
            diff = np.where(both_inf, 0.0, np.abs(a - b))
        return bool(np.all(diff <= 1e-9 * (1.0 + np.abs(np.where(both_inf, 0.0, a)))))

    def tail_slope(self, v: np.ndarray) -> float:
        """lim phi(mode + t v)/t for unit v; inf for superlinear growth or
        bounded support."""
        raise NotImplementedError

    def quad_rate(self, v: np.ndarray) -> float:
        """lim phi(mode + t v)/t^2 for unit v (0 when growth is subquadratic,
        inf when support is bounded in that direction)."""
        raise NotImplementedError

    def support_bounded(self) -> bool:
        raise NotImplementedError

    def support_radius(self) -> float:
        """Radius R with supp f inside ball(mode, R); inf when unbounded."""
        return INF

    def centers(self) -> list[np.ndarray]:
        return [self.mode]

    def structure_matrices(self) -> list[np.ndarray]:
        """Matrices whose eigenvectors are natural search directions."""
        return []

    def structure_directions(self) -> list[np.ndarray]:
        """Extra distinguished unit directions (facet normals, vertex rays)."""
        return []


def _points2d(x: np.ndarray, d: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x.reshape(1, -1) if single else x.reshape(-1, d)
    if pts.shape[-1] != d:
        raise SchemaError(f"points have dimension {pts.shape[-1]}, expected {d}")
    return pts, single


@dataclass(frozen=True)
class EllipsoidalDensity(LogDensity):
    """f = alpha * exp(-psi(|A(x-a)|)) for an admissible profile psi."""

    profile: AdmissibleProfile
    e: DEllipsoid

    kind = "ellipsoidal"

    @property
    def dimension(self) -> int:
        return self.e.dim

    @property
    def sup_norm(self) -> float:
        return self.e.height

    @property
    def mode(self) -> np.ndarray:
        return self.e.center

    def phi(self, x):
        pts, single = _points2d(x, self.dimension)
        r = np.linalg.norm((pts - self.e.center) @ self.e.matrix.T, axis=1)
        p = np.asarray(self.profile.eval(r), dtype=float) - math.log(self.e.height)
        return float(p[0]) if single else p

    def tail_slope(self, v):
        if math.isfinite(self.profile.domain_bound):
            return INF
        g = self.profile.growth_slope
        if not math.isfinite(g):
            return INF
        return g * float(np.linalg.norm(self.e.matrix @ np.asarray(v, dtype=float)))

    def quad_rate(self, v):
        if math.isfinite(self.profile.domain_bound):
            return INF
        if self.profile.s is not None and math.isinf(self.profile.s):
            return float(np.linalg.norm(self.e.matrix @ np.asarray(v, dtype=float))) ** 2
        if math.isfinite(self.profile.growth_slope):
            return 0.0
        # superlinear non-quadratic profile: probe numerically
        t = 1e5
        p = float(np.asarray(self.phi(self.e.center + t * np.asarray(v, dtype=float))))
        return max(0.0, (p + math.log(self.e.height)) / t ** 2)

    def support_bounded(self):
        return math.isfinite(self.profile.domain_bound)

    def support_radius(self):
        if not self.support_bounded():
            return INF
        return self.profile.domain_bound / float(self.e.eigvals()[0])

    def structure_matrices(self):
        return [np.asarray(self.e.matrix)]


@dataclass(frozen=True)
class GaussianDensity(LogDensity):
    """f = alpha * exp(-|A(x-a)|^2)."""

    e: DEllipsoid

    kind = "gaussian"

    @property
    def dimension(self) -> int:
        return self.e.dim

    @property
    def sup_norm(self) -> float:
        return self.e.height

    @property
    def mode(self) -> np.ndarray:
        return self.e.center

    def phi(self, x):
        pts, single = _points2d(x, self.dimension)
        r2 = np.sum(((pts - self.e.center) @ self.e.matrix.T) ** 2, axis=1)
        p = r2 - math.log(self.e.height)
        return float(p[0]) if single else p

    def tail_slope(self, v):
        return INF

    def quad_rate(self, v):
        return float(np.linalg.norm(self.e.matrix @ np.asarray(v, dtype=float))) ** 2

    def support_bounded(self):
        return False

    def structure_matrices(self):
        return [np.asarray(self.e.matrix)]


def _hull_facets(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outward facet description (N, h) with K = {x : N x <= h}, h > 0."""
    d = vertices.shape[1]
    if d == 1:
        lo, hi = float(vertices.min()), float(vertices.max())
        if not (lo < 0 < hi):
            raise SchemaError("origin is not interior to the vertex hull")
        return np.array([[1.0], [-1.0]]), np.array([hi, -lo])
    from scipy.spatial import ConvexHull

    hull = ConvexHull(vertices)
    eq = hull.equations  # rows (n, c) with n.x + c <= 0
    normals = eq[:, :d]
    offsets = -eq[:, d]
    if np.any(offsets <= 1e-12):
        raise SchemaError("origin is not interior to the vertex hull")
    return normals, offsets


@dataclass(frozen=True)
class GaugePowerDensity(LogDensity):
    """f = alpha * exp(-||x||_K^p) for the gauge of conv(vertices), p >= 1."""

    vertices: np.ndarray
    p: float
    height: float
    _normals: np.ndarray = field(init=False, repr=False, compare=False)
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "gauge_power"

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if not self.p >= 1:
            raise SchemaError("gauge exponent p must be >= 1")
        if not float(self.height) > 0:
            raise SchemaError("height must be positive")
        n, h = _hull_facets(v)
        object.__setattr__(self, "vertices", _readonly(v))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "height", float(self.height))
        object.__setattr__(self, "_normals", _readonly(n))
        object.__setattr__(self, "_offsets", _readonly(h))

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def sup_norm(self) -> float:
        return self.height

    @property
    def mode(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def gauge(self, x):
        pts, single = _points2d(x, self.dimension)
        g = np.max((pts @ self._normals.T) / self._offsets, axis=1)
        g = np.maximum(g, 0.0)
        return float(g[0]) if single else g

    def phi(self, x):
        g = self.gauge(x)
        return np.asarray(g, dtype=float) ** self.p - math.log(self.height)

    def tail_slope(self, v):
        if self.p > 1:
            return INF
        return float(self.gauge(np.asarray(v, dtype=float)))

    def quad_rate(self, v):
        if self.p > 2:
            return INF
        if self.p == 2:
            return float(self.gauge(np.asarray(v, dtype=float))) ** 2
        return 0.0

    def support_bounded(self):
        return False

    def volume(self) -> float:
        """Volume of K = conv(vertices)."""
        if self.dimension == 1:
            return float(self.vertices.max() - self.vertices.min())
        from scipy.spatial import ConvexHull

        return float(ConvexHull(self.vertices).volume)

    def structure_directions(self):
        dirs = [r / np.linalg.norm(r) for r in np.asarray(self._normals)]
        dirs += [r / np.linalg.norm(r) for r in np.asarray(self.vertices)
                 if np.linalg.norm(r) > 1e-12]
        return dirs


def _minimax_mode(parts: Sequence[LogDensity], d: int) -> tuple[np.ndarray, float]:
    """argmin / min of max_i phi_i: the mode and -log sup-norm of a min_of."""

    def obj(x):
        vals = [float(np.asarray(p.phi(x))) for p in parts]
        m = max(vals)
        return m if math.isfinite(m) else 1e30 + float(np.linalg.norm(x))

    starts = [p.mode for p in parts]
    starts.append(np.mean([p.mode for p in parts], axis=0))
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            starts.append(0.5 * (parts[i].mode + parts[j].mode))
    best_x, best_v = starts[0], obj(starts[0])
    for s0 in starts:
        res = optimize.minimize(obj, np.asarray(s0, dtype=float), method="Nelder-Mead",
                                options={"xatol": 1e-13, "fatol": 1e-14,
                                         "maxfev": 4000})
        if res.fun < best_v:
            best_x, best_v = res.x, float(res.fun)
    return np.asarray(best_x, dtype=float), best_v


@dataclass(frozen=True)
class MinOfDensity(LogDensity):
    """Pointwise minimum of log-concave parts (log-concave: phi = max phi_i)."""

    parts: tuple[LogDensity, ...]
    _mode: np.ndarray = field(init=False, repr=False, compare=False)
    _sup: float = field(init=False, repr=False, compare=False)

    kind = "min_of"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise SchemaError("min_of needs at least one part")
        d = parts[0].dimension
        if any(p.dimension != d for p in parts):
            raise SchemaError("min_of parts have mixed dimensions")
        object.__setattr__(self, "parts", parts)
        m, v = _minimax_mode(parts, d)
        object.__setattr__(self, "_mode", _readonly(m))
        object.__setattr__(self, "_sup", math.exp(-v))

    @property
    def dimension(self) -> int:
        return self.parts[0].dimension

    @property
    def sup_norm(self) -> float:
        return self._sup

    @property
    def mode(self) -> np.ndarray:
        return self._mode

    def phi(self, x):
        vals = np.stack([np.asarray(p.phi(x), dtype=float) for p in self.parts])
        return np.max(vals, axis=0)

    def tail_slope(self, v):
        return max(p.tail_slope(v) for p in self.parts)

    def quad_rate(self, v):
        return max(p.quad_rate(v) for p in self.parts)

    def support_bounded(self):
        return any(p.support_bounded() for p in self.parts)

    def support_radius(self):
        radii = [p.support_radius() + float(np.linalg.norm(p.mode - self.mode))
                 for p in self.parts if p.support_bounded()]
        return min(radii) if radii else INF

    def centers(self):
        out = [self._mode]
        for p in self.parts:
            out.extend(p.centers())
        return out

    def structure_matrices(self):
        out = []
        for p in self.parts:
            out.extend(p.structure_matrices())
        return out

    def structure_directions(self):
        out = []
        for p in self.parts:
            out.extend(p.structure_directions())
        return out


@dataclass(frozen=True)
class CoverDensity(LogDensity):
    """Upper envelope max_i f_i: the joint-cover input (phi = min phi_i).

    Not necessarily log-concave; used to ask for one function dominating every
    part. Exact sup-norm and mode come from the best part.
    """

    parts: tuple[LogDensity, ...]

    kind = "cover"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise SchemaError("cover needs at least one part")
        d = parts[0].dimension
        if any(p.dimension != d for p in parts):
            raise SchemaError("cover parts have mixed dimensions")
        object.__setattr__(self, "parts", parts)

    @property
    def dimension(self) -> int:
        return self.parts[0].dimension

    @property
    def sup_norm(self) -> float:
        return max(p.sup_norm for p in self.parts)

    @property
    def mode(self) -> np.ndarray:
        k = int(np.argmax([p.sup_norm for p in self.parts]))
        return self.parts[k].mode

    def phi(self, x):
        vals = np.stack([np.asarray(p.phi(x), dtype=float) for p in self.parts])
        return np.min(vals, axis=0)

    def tail_slope(self, v):
        return min(p.tail_slope(v) for p in self.parts)

    def quad_rate(self, v):
        return min(p.quad_rate(v) for p in self.parts)

    def support_bounded(self):
        return all(p.support_bounded() for p in self.parts)

    def support_radius(self):
        if not self.support_bounded():
            return INF
        return max(p.support_radius() + float(np.linalg.norm(p.mode - self.mode))
                   for p in self.parts)

    def centers(self):
        out = []
        for p in self.parts:
            out.extend(p.centers())
        return out

    def structure_matrices(self):
        out = []
        for p in self.parts:
            out.extend(p.structure_matrices())
        return out

    def structure_directions(self):
        out = []
        for p in self.parts:
            out.extend(p.structure_directions())
        return out


@dataclass(frozen=True)
class HeightDensity(LogDensity):
    """f = (1/alpha) (1 - |A^{-1}(x-a)|^2)^{s/2} on A B^d + a (0 outside).

    s = 0 gives (1/alpha) * indicator; s = inf gives
    (1/alpha) exp(-|A^{-1}(x-a)|^2).
    """

    s: float
    e: DEllipsoid
    _inv: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "height"

    def __post_init__(self):
        if not (self.s >= 0 or math.isinf(self.s)):
            raise SchemaError("s must lie in [0, inf]")
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "_inv", _readonly(np.linalg.inv(self.e.matrix)))

    @property
    def dimension(self) -> int:
        return self.e.dim

    @property
    def sup_norm(self) -> float:
        return 1.0 / self.e.height

    @property
    def mode(self) -> np.ndarray:
        return self.e.center

    def phi(self, x):
        pts, single = _points2d(x, self.dimension)
        u2 = np.sum(((pts - self.e.center) @ self._inv.T) ** 2, axis=1)
        la = math.log(self.e.height)
        if math.isinf(self.s):
            p = la + u2
        elif self.s == 0:
            p = np.where(u2 <= 1.0 + 1e-15, la, INF)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                p = np.where(u2 < 1.0, la - 0.5 * self.s * np.log1p(-np.minimum(u2, 1.0 - 1e-300)), INF)
        return float(p[0]) if single else p

    def tail_slope(self, v):
        return INF

    def quad_rate(self, v):
        if math.isinf(self.s):
            return float(np.linalg.norm(self._inv @ np.asarray(v, dtype=float))) ** 2
        return INF

    def support_bounded(self):
        return not math.isinf(self.s)

    def support_radius(self):
        if math.isinf(self.s):
            return INF
        return float(np.linalg.eigvalsh(self.e.matrix)[-1])

    def structure_matrices(self):
        return [np.asarray(self._inv)]


# ---------------------------------------------------------------------------
# reports and certificates


@dataclass(frozen=True)
class SolveReport:
    """Solver output: optimal triple, objective, certificate diagnostics.

    ``objective`` is log(height) - log det(matrix) for both solve directions;
    the minimal covering integral is e^{objective} * V_psi, the maximal
    inscribed integral is e^{-objective} * W_s (``side`` says which reading
    applies). ``max_violation`` is the best found value of log f - log ell
    (or log h - log f on the inscribed side).
    """

    optimum: DEllipsoid
    objective: float
    integral: float
    active_points: tuple[np.ndarray, ...]
    max_violation: float
    iterations: int
    converged: bool
    side: str = "lowner"


@dataclass(frozen=True)
class Certificate:
    """Outcome of a domination search.

    ``margin`` is the largest found value of log f - log ell; ``holds`` means
    the relation passed at every tested point (margin <= tol). ``status`` is
    one of "holds", "violation", "inconclusive" (budget exhausted while still
    improving -- never a silent pass).
    """

    holds: bool
    witness: Optional[np.ndarray]
    margin: float
    status: str
    evaluations: int


# ---------------------------------------------------------------------------
# evaluation formulas


def ellipsoidal_eval(profile: AdmissibleProfile, e: DEllipsoid, x: np.ndarray):
    """ell(x) = alpha * exp(-psi(|A(x-a)|)); exactly 0 outside the domain."""
    pts, single = _points2d(x, e.dim)
    r = np.linalg.norm((pts - e.center) @ e.matrix.T, axis=1)
    p = np.asarray(profile.eval(r), dtype=float)
    out = np.where(np.isinf(p), 0.0, e.height * np.exp(-np.where(np.isinf(p), 0.0, p)))
    return float(out[0]) if single else out


def ellipsoidal_integral(e: DEllipsoid, v_psi: float) -> float:
    """Integral of ell over R^d: height / det(matrix) * V_psi."""
    return e.height / e.det() * float(v_psi)


# ---------------------------------------------------------------------------
# violation search engine


def _unique_rows(rows: list[np.ndarray], tol: float = 1e-9) -> list[np.ndarray]:
    """Drop non-finite rows and bin-quantized duplicates, keeping first
    occurrences in order. Near-duplicates straddling a bin edge may both
    survive; extra rows are harmless downstream."""
    if not rows:
        return []
    arr = np.atleast_2d(np.asarray(rows, dtype=float))
    arr = arr[np.all(np.isfinite(arr), axis=1)]
    if arr.shape[0] == 0:
        return []
    scale = tol * (1.0 + np.abs(arr).max())
    keys = np.round(arr / scale).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return [arr[i] for i in np.sort(first)]


def sobol_sample(d: int, n: int, seed: int) -> np.ndarray:
    """n scrambled low-discrepancy points in [0, 1)^d (drawn at the next
    power of two to keep the sequence balanced, then truncated)."""
    sob = qmc.Sobol(d, scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(max(2, n))))
    return sob.random_base2(m)[:n]


def sphere_directions(d: int, n_extra: int = 24, seed: int = 0,
                      matrices: Sequence[np.ndarray] = (),
                      extra: Sequence[np.ndarray] = ()) -> list[np.ndarray]:
    """Canonical axes, eigenvector frames of the given matrices, supplied
    directions, and a seeded low-discrepancy sphere sample."""
    dirs: list[np.ndarray] = [np.eye(d)[i] for i in range(d)]
    if d > 1:
        dirs.append(np.ones(d) / math.sqrt(d))
    for m in matrices:
        w, v = np.linalg.eigh(np.asarray(m, dtype=float))
        dirs.extend(v[:, i] for i in range(d))
    dirs.extend(np.asarray(e, dtype=float) for e in extra)
    if n_extra > 0:
        if d == 1:
            pass
        else:
            pts = sobol_sample(d, n_extra, seed) * 2.0 - 1.0
            for p in pts:
                nrm = np.linalg.norm(p)
                if nrm > 1e-9:
                    dirs.append(p / nrm)
    dirs = [u / np.linalg.norm(u) for u in dirs if np.linalg.norm(u) > 1e-12]
    # deduplicate up to sign
    out: list[np.ndarray] = []
    for u in dirs:
        if all(min(np.linalg.norm(u - w), np.linalg.norm(u + w)) > 1e-9 for w in out):
            out.append(u)
    return out


def ray_level_radius(f: LogDensity, x0: np.ndarray, v: np.ndarray,
                     level: float, cap: float = 1e9) -> float:
    """Smallest t with phi(x0 + t v) >= level, by doubling + bisection."""
    lo, hi = 0.0, 1.0
    for _ in range(120):
        p = float(np.asarray(f.phi(x0 + hi * v)))
        if p >= level or hi >= cap:
            break
        lo, hi = hi, hi * 2.0
    if hi >= cap:
        return cap
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if float(np.asarray(f.phi(x0 + mid * v))) >= level:
            hi = mid
        else:
            lo = mid
    return hi


class _ViolationProblem:
    """Shared machinery for searching sup log f - log ell."""

    def __init__(self, f: LogDensity, profile: AdmissibleProfile, e: DEllipsoid,
                 seed: int = 0):
        self.f = f
        self.profile = profile
        self.e = e
        self.d = f.dimension
        if e.dim != self.d:
            raise SchemaError("density and ellipsoid dimensions differ")
        self.evals = 0

    def phi_ell(self, pts: np.ndarray) -> np.ndarray:
        r = np.linalg.norm((np.atleast_2d(pts) - self.e.center) @ self.e.matrix.T,
                           axis=1)
        return np.asarray(self.profile.eval(r), dtype=float) - math.log(self.e.height)

    def violation(self, pts: np.ndarray) -> np.ndarray:
        """log f - log ell at each row; +inf where f > 0 but ell = 0."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        self.evals += len(pts)
        pf = np.asarray(self.f.phi(pts), dtype=float)
        pl = self.phi_ell(pts)
        out = np.where(np.isinf(pf), -INF, np.where(np.isinf(pl), INF, pl - pf))
        # both infinite: f = ell = 0, no violation
        both = np.isinf(pf) & np.isinf(pl)
        return np.where(both, -INF, out)

    # -- candidate construction ------------------------------------------

    def search_radius(self, dirs: Sequence[np.ndarray]) -> float:
        f, e = self.f, self.e
        base = float(np.linalg.norm(np.asarray(f.mode) - e.center)) + 1.0
        if f.support_bounded():
            rf = f.support_radius()
        else:
            lvl = float(np.asarray(f.phi(f.mode))) + 40.0 + 5.0 * self.d
            rf = max(ray_level_radius(f, np.asarray(f.mode), v, lvl, cap=1e7)
                     for v in dirs)
        tl = self.profile.inverse(40.0 + max(0.0, math.log(self.e.height / max(f.sup_norm, 1e-300))))
        rl = tl / float(e.eigvals()[0]) if math.isfinite(tl) else rf
        return min(1e7, 1.5 * (base + max(rf, rl)))

    def candidates(self, seed: int, n_sobol: int,
                   n_dense: int = 4097) -> np.ndarray:
        f, e, d = self.f, self.e, self.d
        mats = [np.asarray(e.matrix)] + f.structure_matrices()
        dirs = sphere_directions(d, 16, seed, mats, f.structure_directions())
        R = self.search_radius(dirs)
        anchors = _unique_rows(list(f.centers()) + [np.asarray(e.center), np.asarray(f.mode)])
        pts: list[np.ndarray] = list(anchors)
        for i in range(len(anchors)):
            for j in range(i + 1, len(anchors)):
                pts.append(0.5 * (anchors[i] + anchors[j]))
        lvl0 = float(np.asarray(f.phi(f.mode)))
        levels = [0.25, 0.5, 1.0, 2.0, 4.0, 2.0 * d, 8.0 * d]
        for anchor in anchors[: max(3, len(anchors))]:
            for v in dirs:
                for lv in levels:
                    t = ray_level_radius(f, anchor, v, lvl0 + lv, cap=R)
                    if t < R:
                        pts.append(anchor + t * v)
                    t2 = ray_level_radius(f, anchor, -v, lvl0 + lv, cap=R)
                    if t2 < R:
                        pts.append(anchor - t2 * v)
        if n_sobol > 0 and d >= 1:
            box = sobol_sample(d, n_sobol, seed + 1) * 2.0 - 1.0
            pts.extend(np.asarray(f.mode) + box * R)
        if d == 1:
            # dense axis grid: 1-D searches are effectively exact
            g = np.linspace(-R, R, n_dense)[:, None] + np.asarray(f.mode)[None, :]
            pts.extend(g)
        return np.array(_unique_rows(pts, tol=1e-12)), R, dirs

    # -- tail analysis -----------------------------------------------------

    def tail_check(self, dirs: Sequence[np.ndarray], R: float):
        """Compare asymptotic growth of -log ell vs -log f along rays.

        Returns (violation_value, witness) or None. Exact slope comparison for
        linear-growth profiles; quadratic-rate comparison for the quadratic
        profile; large-T probing to produce a concrete witness.
        """
        f, e = self.f, self.e
        if f.support_bounded():
            return None
        quad = self.profile.s is not None and math.isinf(self.profile.s)
        for v in dirs:
            for u in (v, -v):
                if quad:
                    rl = float(np.linalg.norm(e.matrix @ u)) ** 2
                    rf = f.quad_rate(u)
                else:
                    g = self.profile.growth_slope
                    if not math.isfinite(g):
                        # bounded-domain handled elsewhere; superlinear profile
                        rl, rf = INF, f.tail_slope(u)
                        if math.isinf(rf):
                            continue
                    else:
                        rl = g * float(np.linalg.norm(e.matrix @ u))
                        rf = f.tail_slope(u)
                if math.isinf(rf):
                    continue
                if rl > rf * (1 + 1e-12) + 1e-300:
                    t = max(R, 1.0)
                    base = np.asarray(f.mode, dtype=float)
                    for _ in range(80):
                        val = float(self.violation(base + t * u)[0])
                        if val > 0:
                            return val, base + t * u
                        t *= 2.0
                        if t > 1e12:
                            break
        return None

    # -- local polish ------------------------------------------------------

    def polish(self, x0: np.ndarray, maxfev: int) -> tuple[float, np.ndarray]:
        def neg(x):
            v = float(self.violation(x[None, :])[0])
            if math.isinf(v):
                return -1e30 if v > 0 else 1e30
            return -v

        res = optimize.minimize(neg, np.asarray(x0, dtype=float),
                                method="Nelder-Mead",
                                options={"xatol": 1e-11, "fatol": 1e-13,
                                         "maxfev": maxfev})
        return -float(res.fun), np.asarray(res.x, dtype=float)


def violation_search(f: LogDensity, profile: AdmissibleProfile, e: DEllipsoid,
                     budget: int = 4000, seed: int = 0, topk: int = 1
                     ) -> tuple[float, list[tuple[float, np.ndarray]], int, bool]:
    """Search sup(log f - log ell). Returns (margin, top points, evals, done).

    ``done`` is False when the budget cut the planned passes short.
    """
    prob = _ViolationProblem(f, profile, e, seed)
    n_sobol = max(16, min(256, budget // 8))
    n_dense = int(min(4097, max(257, budget)))
    pts, R, dirs = prob.candidates(seed, n_sobol, n_dense)
    vals = prob.violation(pts)
    # infinite violation: f positive where ell vanishes
    inf_mask = np.isposinf(vals)
    if np.any(inf_mask):
        x = pts[int(np.argmax(inf_mask))]
        return INF, [(INF, x)], prob.evals, True

    order = np.argsort(vals)[::-1]
    results: list[tuple[float, np.ndarray]] = []
    done = True
    n_polish = min(len(order), max(4, topk * 3))
    per_start = max(200, budget // max(1, n_polish))
    for idx in order[:n_polish]:
        if prob.evals >= budget * 4:
            done = False
            break
        v, x = prob.polish(pts[idx], per_start)
        results.append((v, x))
    for idx in order[:topk]:
        results.append((float(vals[idx]), pts[idx]))

    tail = prob.tail_check(dirs, R)
    if tail is not None:
        results.append(tail)

    # unbounded local searches can run witnesses out to absurd radii; pull
    # them back so downstream constraint rows stay well scaled (the measured
    # violation value is kept as the margin)
    mode = np.asarray(f.mode, dtype=float)
    clamp = 4.0 * R
    clamped: list[tuple[float, np.ndarray]] = []
    for v, x in results:
        dx = x - mode
        r = float(np.linalg.norm(dx))
        if math.isfinite(r) and r > clamp:
            x = mode + dx * (clamp / r)
        clamped.append((v, x))

    clamped.sort(key=lambda t: -t[0])
    dedup: list[tuple[float, np.ndarray]] = []
    for v, x in clamped:
        if all(np.linalg.norm(x - y) > 1e-8 * (1 + np.linalg.norm(x))
               for _, y in dedup):
            dedup.append((v, x))
        if len(dedup) >= topk:
            break
    margin = dedup[0][0] if dedup else -INF
    return margin, dedup, prob.evals, done


def is_below(f: LogDensity, profile: AdmissibleProfile, e: DEllipsoid,
             budget: int = 4000, seed: int = 0, tol: float = 1e-9) -> Certificate:
    """Certificate for f <= ell_{profile, e}.

    Structured search: part anchors, level-set extremes along eigenvector and
    facet directions, pairwise midpoints, a seeded low-discrepancy cloud, a
    dense axis grid in dimension 1, local polish of the best candidates, and
    asymptotic ray comparison for the tails. ``holds`` is reported only when
    all planned passes completed within budget and no tested point violates.
    """
    margin, top, evals, done = violation_search(f, profile, e, budget, seed)
    witness = None
    if margin > tol:
        witness = top[0][1]
        return Certificate(False, witness, margin, "violation", evals)
    if not done:
        return Certificate(False, None, margin, "inconclusive", evals)
    return Certificate(True, None, margin, "holds", evals)
