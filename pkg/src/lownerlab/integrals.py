"""Radial quadrature for profile volume constants and the Tricomi closed form.

V_psi(d) is the integral over R^d of exp(-psi(|x|)); by the radial change of
variables this is d * omega_d * int_0^inf t^(d-1) exp(-psi(t)) dt where
omega_d is the unit-ball volume. lambda1 is the same constant in dimension 1.

For the interpolation family psi_s there is a closed form in terms of the
Tricomi confluent hypergeometric function

    U(a; b; z) = (1/Gamma(a)) int_0^inf v^(a-1) (v+1)^(b-a-1) e^(-zv) dv.

Substituting t = (s/2) sqrt(w^2 - 1) and then w = 1 + 2v into the radial
integral gives

    int_0^inf t^(d-1) e^(-psi_s(t)) dt
      = (s/2)^d e^... -> after collecting factors,

    V_psi(psi_s, d) = pi^(d/2) s^d [ d * U(d/2 + 1; d + s/2 + 1; s)
                                     + U(d/2; d + s/2; s) ].

(The split comes from writing the factor w = 1 + 2v as the sum of its two
terms; note the second U carries parameter b = d + s/2, one less than the
first.) The identity is cross-validated against direct quadrature in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from .core import AdmissibleProfile
from .errors import QuadratureError, SchemaError

__all__ = [
    "QuadratureSpec",
    "unit_ball_volume",
    "v_psi",
    "lambda1",
    "tricomi_u",
    "v_psi_s_closed",
    "w_s",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and tail policy for the radial quadrature.

    ``tail_cutoff_policy`` is "auto" (truncate where the analytic tail bound
    drops below the tolerances, then double for headroom) or a positive float
    multiplying the auto cutoff.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    tail_cutoff_policy: Union[str, float] = "auto"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise SchemaError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise SchemaError("max_subdivisions must be at least 10")
        if not isinstance(self.tail_cutoff_policy, str):
            if not float(self.tail_cutoff_policy) > 0:
                raise SchemaError("tail cutoff factor must be positive")


def unit_ball_volume(d: int) -> float:
    """omega_d = pi^(d/2) / Gamma(d/2 + 1)."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def _tail_bound(profile: AdmissibleProfile, T: float, d: int) -> float:
    """Upper bound on int_T^inf t^(d-1) e^(-psi) dt via the secant slope.

    Convexity gives psi(t) >= psi(T) + sigma (t - T) for t >= T with
    sigma = (psi(T) - psi(T/2)) / (T/2); then the tail is at most
    e^(-psi(T)) sum_j C(d-1, j) T^(d-1-j) j! / sigma^(j+1).
    """
    pT = float(np.asarray(profile.eval(T)))
    pH = float(np.asarray(profile.eval(T / 2.0)))
    if not math.isfinite(pT):
        return 0.0
    sigma = (pT - pH) / (T / 2.0)
    if sigma <= 0:
        return math.inf
    total = 0.0
    for j in range(d):
        total += (math.comb(d - 1, j) * T ** (d - 1 - j)
                  * math.factorial(j) / sigma ** (j + 1))
    return math.exp(-pT) * total if pT < 700 else 0.0


def _radial_integral(profile: AdmissibleProfile, d: int,
                     spec: QuadratureSpec) -> float:
    def integrand(t):
        p = float(np.asarray(profile.eval(t)))
        if not math.isfinite(p):
            return 0.0
        if d == 1:
            return math.exp(-p)
        return t ** (d - 1) * math.exp(-p) if p < 700 else 0.0

    kinks = []
    if profile.pieces:
        for slope, icpt in profile.pieces:
            if slope > 0:
                kinks.append(-icpt / slope)

    if math.isfinite(profile.domain_bound):
        lo, hi = 0.0, profile.domain_bound
    else:
        # grow T until the analytic tail bound is negligible, then double it
        # so that halving the cutoff stays within tolerance
        rough, _ = integrate.quad(integrand, 0.0, 1.0, limit=50)
        T = 1.0
        for _ in range(200):
            b = _tail_bound(profile, T, d)
            rough_scale = max(abs(rough), 1e-300)
            if b <= 0.125 * max(spec.abs_tol, spec.rel_tol * rough_scale):
                break
            T *= 2.0
        else:
            raise QuadratureError("could not bound the quadrature tail")
        T *= 2.0
        if not isinstance(spec.tail_cutoff_policy, str):
            T *= float(spec.tail_cutoff_policy)
        lo, hi = 0.0, T

    pts = [k for k in kinks if lo < k < hi] or None
    val, err = integrate.quad(integrand, lo, hi, limit=spec.max_subdivisions,
                              epsabs=spec.abs_tol * 0.1,
                              epsrel=spec.rel_tol * 0.1, points=pts)
    if err > 10.0 * max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise QuadratureError(
            f"radial quadrature achieved {err:g}, wanted "
            f"abs {spec.abs_tol:g} / rel {spec.rel_tol:g}")
    return val


def v_psi(profile: AdmissibleProfile, d: int,
          spec: QuadratureSpec | None = None) -> float:
    """V_psi(d) = d * omega_d * int_0^inf t^(d-1) e^(-psi(t)) dt."""
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise SchemaError(f"dimension must be a positive integer, got {d!r}")
    spec = spec or QuadratureSpec()
    return d * unit_ball_volume(int(d)) * _radial_integral(profile, int(d), spec)


def lambda1(profile: AdmissibleProfile,
            spec: QuadratureSpec | None = None) -> float:
    """The one-dimensional volume constant: lambda1 = v_psi(profile, 1)."""
    return v_psi(profile, 1, spec)


def _eta_factory(a: float, b: float, z: float):
    c = b - a - 1.0

    def eta(v):
        if v <= 0.0:
            if a == 1.0:
                return 0.0
            return math.inf if a < 1.0 else -math.inf
        return (a - 1.0) * math.log(v) + c * math.log1p(v) - z * v

    return eta, c


def _eta_peak(a: float, c: float, z: float) -> float:
    """Positive stationary point of (a-1) ln v + c ln(1+v) - z v, or 0."""
    # z v^2 + (z - (a - 1) - c) v - (a - 1) = 0
    B = z - (a - 1.0) - c
    C = -(a - 1.0)
    disc = B * B - 4.0 * z * C
    if disc < 0:
        return 0.0
    root = (-B + math.sqrt(disc)) / (2.0 * z)
    return max(root, 0.0)


def tricomi_u(a: float, b: float, z: float, rel_tol: float = 1e-8) -> float:
    """Tricomi confluent hypergeometric function via its integral form.

    U(a; b; z) = (1/Gamma(a)) int_0^inf v^(a-1) (1+v)^(b-a-1) e^(-zv) dv for
    a > 0, z > 0. The integrand is evaluated in log space with a peak shift so
    that very large b and z (b, z in the thousands) stay in range, and the
    v^(a-1) endpoint singularity for a < 1 is removed by the substitution
    v = w^(1/a) on [0, 1].
    """
    a, b, z = float(a), float(b), float(z)
    if not (a > 0 and math.isfinite(a)):
        raise SchemaError(f"tricomi_u requires a > 0, got {a}")
    if not (z > 0 and math.isfinite(z)):
        raise SchemaError(f"tricomi_u requires z > 0, got {z}")
    if not math.isfinite(b):
        raise SchemaError("tricomi_u requires finite b")

    eta, c = _eta_factory(a, b, z)
    vp = _eta_peak(a, c, z)

    # upper truncation: beyond the peak eta decreases; step out until the
    # integrand is 1e-40 of its maximum
    probes = [p for p in (vp, 0.5, 1.0, 2.0) if p > 0]
    if a >= 1.0:
        probes.append(1e-12)
    M = max(eta(p) for p in probes)
    if a == 1.0:
        M = max(M, 0.0)
    V = max(1.0, 2.0 * vp)
    for _ in range(400):
        if eta(V) - M < -92.0:
            break
        V *= 2.0
    else:
        raise QuadratureError("tricomi_u integrand does not decay")

    limit = 400
    if a >= 1.0:
        def g(v):
            e = eta(v) - M
            return math.exp(e) if e > -745 else 0.0

        pts = [vp] if 0 < vp < V else None
        val, err = integrate.quad(g, 0.0, V, limit=limit, points=pts,
                                  epsabs=1e-14, epsrel=rel_tol * 1e-2)
        total_log = M + math.log(max(val, 5e-324))
        total_err_rel = err / max(val, 5e-324)
    else:
        # [0,1]: v = w^(1/a) removes the endpoint singularity exactly
        inv_a = 1.0 / a

        def g01(w):
            if w <= 0.0:
                v = 0.0
            else:
                v = w ** inv_a
            e = c * math.log1p(v) - z * v - M
            return inv_a * math.exp(e) if e > -745 else 0.0

        def g1inf(v):
            e = eta(v) - M
            return math.exp(e) if e > -745 else 0.0

        v1, e1 = integrate.quad(g01, 0.0, 1.0, limit=limit,
                                epsabs=1e-14, epsrel=rel_tol * 1e-2)
        pts = [vp] if 1 < vp < V else None
        v2, e2 = (0.0, 0.0)
        if V > 1.0:
            v2, e2 = integrate.quad(g1inf, 1.0, V, limit=limit, points=pts,
                                    epsabs=1e-14, epsrel=rel_tol * 1e-2)
        val, err = v1 + v2, e1 + e2
        total_log = M + math.log(max(val, 5e-324))
        total_err_rel = err / max(val, 5e-324)

    if total_err_rel > rel_tol:
        raise QuadratureError(
            f"tricomi_u achieved rel {total_err_rel:g}, wanted {rel_tol:g}")
    out_log = total_log - math.lgamma(a)
    if out_log > 700.0:
        raise QuadratureError("tricomi_u overflow")
    return math.exp(out_log)


def v_psi_s_closed(s: float, d: int) -> float:
    """Closed form of V_psi(psi_s, d) for finite s > 0:

    pi^(d/2) s^d [ d U(d/2 + 1; d + s/2 + 1; s) + U(d/2; d + s/2; s) ].
    """
    s = float(s)
    if not (0 < s < math.inf):
        raise SchemaError(f"closed form needs s in (0, inf), got {s}")
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise SchemaError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    u1 = tricomi_u(d / 2.0 + 1.0, d + s / 2.0 + 1.0, s)
    u2 = tricomi_u(d / 2.0, d + s / 2.0, s)
    return math.pi ** (d / 2.0) * s ** d * (d * u1 + u2)


def w_s(s: float, d: int) -> float:
    """Ball integral of (1 - |u|^2)^(s/2):

    W_s(d) = pi^(d/2) Gamma(s/2 + 1) / Gamma((d + s)/2 + 1) for finite s,
    with the Gaussian convention pi^(d/2) at s = inf (the s = inf member is
    exp(-|u|^2), not a pointwise limit of the normalized powers).
    """
    if math.isinf(s):
        return math.pi ** (d / 2.0)
    if not s >= 0:
        raise SchemaError(f"s must lie in [0, inf], got {s}")
    return math.pi ** (d / 2.0) * math.exp(
        math.lgamma(s / 2.0 + 1.0) - math.lgamma((d + s) / 2.0 + 1.0))
