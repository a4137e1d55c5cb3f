"""The interpolating profile family psi_s, s in [0, inf].

psi_0(t) = t, psi_inf(t) = t^2, and for finite positive s

    psi_s(t) = (s/2) * [ sqrt(1 + 4 t^2 / s^2)
                         - log((1 + sqrt(1 + 4 t^2 / s^2)) / 2) - 1 ].

Each member is convex, strictly increasing, psi_s(0) = 0, with unit slope at
infinity for every finite s and quadratic behaviour t^2/(2s) + O(t^4) near 0.
The family decreases pointwise in s and s * psi_s(t) increases in s.

Numerically the finite-s branch is computed from w - 1 directly:
with u = 4 (t/s)^2 and w = sqrt(1 + u), the quantity w - 1 = u / (1 + w)
avoids cancellation, and log((1 + w)/2) = log1p((w - 1)/2). For
u < 1e-8 a two-term series t^2/(2s) - t^4/(4 s^3) is used instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import INF, AdmissibleProfile
from .errors import SchemaError

__all__ = [
    "PsiS",
    "psi_s_eval",
    "psi_s_derivative",
    "profile_of",
    "scaled_monotonicity_check",
]

_SERIES_CUT = 1e-8  # threshold on u = 4 (t/s)^2


def _validate_s(s: float) -> float:
    s = float(s)
    if math.isnan(s) or s < 0:
        raise SchemaError(f"s must lie in [0, inf], got {s}")
    return s


def psi_s_eval(s: float, t):
    """psi_s(t), vectorized over t >= 0.

    s = 0 gives t, s = math.inf gives t^2; these endpoints are exact special
    cases, not limits of the finite-s formula.
    """
    s = _validate_s(s)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0):
        raise SchemaError("profile argument t must be nonnegative")
    if s == 0:
        out = t.copy()
    elif math.isinf(s):
        out = t * t
    else:
        u = 4.0 * (t / s) ** 2
        w = np.sqrt(1.0 + u)
        wm1 = u / (1.0 + w)
        main = 0.5 * s * (wm1 - np.log1p(0.5 * wm1))
        t2 = t * t
        series = t2 / (2.0 * s) - t2 * t2 / (4.0 * s ** 3)
        out = np.where(u < _SERIES_CUT, series, main)
    return float(out[0]) if scalar else out


def psi_s_derivative(s: float, t):
    """d/dt psi_s(t) = 2 t / (s (1 + sqrt(1 + 4 t^2/s^2))) for finite s > 0;
    1 for s = 0, 2t for s = inf."""
    s = _validate_s(s)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if s == 0:
        out = np.ones_like(t)
    elif math.isinf(s):
        out = 2.0 * t
    else:
        w = np.sqrt(1.0 + 4.0 * (t / s) ** 2)
        out = 2.0 * t / (s * (1.0 + w))
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PsiS:
    """Callable member of the family, with the profile metadata attached."""

    s: float

    def __post_init__(self):
        object.__setattr__(self, "s", _validate_s(self.s))

    def __call__(self, t):
        return psi_s_eval(self.s, t)

    def derivative(self, t):
        return psi_s_derivative(self.s, t)

    @property
    def growth_slope(self) -> float:
        return INF if math.isinf(self.s) else 1.0

    def conjugate_maximizer(self, r):
        """t* in [0, 1) attaining sup_t [r t + (s/2) log(1 - t^2)] = psi_s(r)
        for finite s > 0: t* = (-s + sqrt(s^2 + 4 r^2)) / (2 r)."""
        s = self.s
        if s == 0 or math.isinf(s):
            raise SchemaError("conjugate maximizer defined for finite s > 0")
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        rr = 4.0 * r * r
        out = np.where(r > 0, rr / (s + np.sqrt(s * s + rr)) / np.maximum(2.0 * r, 1e-300), 0.0)
        return float(out[0]) if scalar else out


def profile_of(s: float) -> AdmissibleProfile:
    """psi_s packaged as an AdmissibleProfile (domain [0, inf) always)."""
    member = PsiS(s)
    pieces = ((1.0, 0.0),) if member.s == 0 else None
    return AdmissibleProfile(
        eval=member,
        domain_bound=INF,
        growth_slope=member.growth_slope,
        strictly_increasing=True,
        pieces=pieces,
        s=member.s,
        name=f"psi[s={member.s:g}]",
    )


def scaled_monotonicity_check(t, s_grid) -> bool:
    """Verify on a grid that s -> psi_s(t) decreases and s -> s psi_s(t)
    increases, for every t in the grid (finite s only for the scaled check)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ss = sorted(float(s) for s in s_grid)
    if any(s < 0 for s in ss):
        raise SchemaError("s grid must be nonnegative")
    vals = [np.atleast_1d(np.asarray(psi_s_eval(s, t), dtype=float)) for s in ss]
    for a, b in zip(vals[:-1], vals[1:]):
        if np.any(b > a + 1e-12 * (1.0 + np.abs(a))):
            return False
    finite = [(s, v) for s, v in zip(ss, vals) if not math.isinf(s) and s > 0]
    for (s1, v1), (s2, v2) in zip(finite[:-1], finite[1:]):
        if np.any(s2 * v2 < s1 * v1 - 1e-12 * (1.0 + np.abs(s1 * v1))):
            return False
    return True
