"""Fast property suites per module, runnable without pytest.

Each check is a named callable that raises AssertionError (or any exception)
on failure; run_selftest collects one record per check. The CLI maps the
aggregate verdict to its exit status. Checks favor breadth over depth: every
module contributes at least one anchor value and one invariant, sized to keep
the whole run near a minute.
"""
from __future__ import annotations

import math
import traceback

import numpy as np

from .core import (INF, DEllipsoid, EllipsoidalDensity, GaugePowerDensity,
                   GaussianDensity, MinOfDensity, is_below, violation_search)
from .errors import InfeasibleError, SchemaError
from .integrals import tricomi_u, unit_ball_volume, v_psi, v_psi_s_closed, w_s
from .interpolation import interpolate, sausage_increasing
from .john_solver import solve_john_s
from .legendre import duality_check, mahler_identity_check, polar_density
from .limits import comparison_band
from .lowner_solver import SolverOptions, solve_lowner_s
from .mvee import john_decomposition, lowner_infty_of_gauge, mvee_centered
from .psi_family import (profile_of, psi_s_derivative, psi_s_eval,
                         scaled_monotonicity_check)
from .ratio import density_integral, outer_integral_ratio, ratio_bound
from .serialize import (density_from_json, density_to_json, report_from_json,
                        report_to_json)

__all__ = ["run_selftest"]


def _close(x, y, rel=1e-9, absolute=0.0):
    assert abs(x - y) <= rel * max(abs(x), abs(y)) + absolute, f"{x} vs {y}"


def _rand_spd(rng, d, lo=0.6, hi=1.8):
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return q @ np.diag(rng.uniform(lo, hi, d)) @ q.T


# ---------------------------------------------------------------------------
# per-module checks


def _check_psi_family():
    _close(psi_s_eval(2.0, math.sqrt(3.0)), 1.0 - math.log(1.5), rel=1e-12)
    assert float(psi_s_eval(0.0, 3.25)) == 3.25
    assert float(psi_s_eval(INF, 1.5)) == 2.25
    for s in (0.7, 4.0):
        t = np.linspace(0.05, 9.0, 25)
        h = 1e-6
        num = (psi_s_eval(s, t + h) - psi_s_eval(s, t - h)) / (2 * h)
        assert np.max(np.abs(num - psi_s_derivative(s, t))) < 1e-7
        mid = psi_s_eval(s, 0.5 * (t[:-1] + t[1:]))
        assert np.all(mid <= 0.5 * (psi_s_eval(s, t[:-1]) + psi_s_eval(s, t[1:]))
                      + 1e-12)
    assert scaled_monotonicity_check([0.3, 1.0, 5.0], [0.5, 1.0, 2.0, 8.0])


def _check_integrals():
    for d in (1, 2, 3):
        _close(v_psi(profile_of(0.0), d),
               math.factorial(d) * unit_ball_volume(d), rel=1e-8)
        _close(v_psi(profile_of(INF), d), math.pi ** (d / 2.0), rel=1e-9)
    _close(tricomi_u(1.0, 2.0, 2.0), 0.5, rel=1e-8)
    _close(v_psi_s_closed(2.0, 2), v_psi(profile_of(2.0), 2), rel=1e-6)
    _close(w_s(INF, 3), math.pi ** 1.5, rel=1e-12)
    _close(w_s(2.0, 1), math.pi / 2.0, rel=1e-12)


def _check_legendre():
    rng = np.random.default_rng(11)
    for s in (0.0, 2.0, INF):
        e = DEllipsoid(_rand_spd(rng, 2), float(rng.uniform(0.5, 2.0)),
                       np.zeros(2))
        assert duality_check(s, e) <= 1e-5, f"duality residual at s={s}"
    e = DEllipsoid(np.diag([2.0, 2.0]), 5.0, np.zeros(2))
    assert mahler_identity_check(1.0, e) <= 1e-5
    g = GaussianDensity(DEllipsoid(np.eye(2), 1.0, np.zeros(2)))
    gp = polar_density(g)
    x = np.array([0.3, -0.7])
    _close(float(gp.phi(x)), 0.25 * float(x @ x), rel=1e-9)


def _check_core():
    prof = profile_of(1.0)
    e = DEllipsoid(np.array([[1.2, 0.1], [0.1, 0.9]]), 1.3,
                   np.array([0.2, -0.1]))
    f = EllipsoidalDensity(prof, e)
    cert = is_below(f, prof, e, budget=1200)
    assert cert.holds and cert.margin <= 1e-9
    shrunk = DEllipsoid(e.matrix * 1.05, e.height, e.center)
    margin, _, _, _ = violation_search(f, prof, shrunk, budget=1200)
    assert margin > 1e-4, "shrunk cover should be violated"
    try:
        DEllipsoid(np.array([[1.0, 0.2], [0.0, 1.0]]), 1.0, np.zeros(2))
        raise AssertionError("asymmetric matrix accepted")
    except SchemaError:
        pass


def _check_interpolation():
    e1 = DEllipsoid(np.eye(2), 1.0, np.zeros(2))
    e2 = DEllipsoid(4.0 * np.eye(2), 1.0, np.zeros(2))
    mid = interpolate(e1, e2, 0.5)
    _close(mid.det(), 6.25, rel=1e-12)
    prof = profile_of(1.0)
    out = sausage_increasing(prof, np.eye(1), 1.0, [-0.6], [0.6])
    assert out.det() < 1.0 and out.height < 1.0
    xs = np.linspace(-12.0, 12.0, 2001).reshape(-1, 1)
    cover = EllipsoidalDensity(prof, out).value(xs)
    lo = np.minimum(
        EllipsoidalDensity(prof, DEllipsoid(np.eye(1), 1.0, [-0.6])).value(xs),
        EllipsoidalDensity(prof, DEllipsoid(np.eye(1), 1.0, [0.6])).value(xs))
    assert np.all(cover >= lo - 1e-12)


def _check_lowner_solver():
    opts = SolverOptions(seed=1)
    e = DEllipsoid(np.array([[1.4]]), 1.2, np.array([0.3]))
    f = EllipsoidalDensity(profile_of(0.0), e)
    rep = solve_lowner_s(f, 0.0, opts)
    assert rep.converged
    _close(float(rep.optimum.matrix[0, 0]), 1.4, rel=1e-4)
    _close(rep.optimum.height, 1.2, rel=1e-4)
    assert f.sup_norm * (1 - 1e-7) <= rep.optimum.height


def _check_john_solver():
    f = GaugePowerDensity(np.array([[-1.0], [1.0]]), 1.0, 1.0)
    rep = solve_john_s(f, 0.0)
    assert rep.converged
    _close(float(rep.optimum.matrix[0, 0]), 1.0, rel=2e-4)
    _close(rep.optimum.height, math.e, rel=2e-4)
    _close(rep.integral, 2.0 / math.e, rel=5e-4)
    g = GaussianDensity(DEllipsoid(np.eye(1), 1.0, np.zeros(1)))
    rep = solve_john_s(g, INF)
    _close(float(rep.optimum.matrix[0, 0]), 1.0, rel=1e-5)
    _close(rep.integral, math.sqrt(math.pi), rel=1e-5)


def _check_mvee():
    square = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    m = mvee_centered(square, tol=1e-10)
    assert np.max(np.abs(m - 0.5 * np.eye(2))) <= 1e-8
    u, c = john_decomposition(square, m)
    resid = np.eye(2) - sum(ci * np.outer(ui, ui) for ci, ui in zip(c, u))
    assert np.linalg.norm(resid) <= 1e-6 and abs(c.sum() - 2.0) <= 1e-6
    e = lowner_infty_of_gauge(square, 2)
    assert np.max(np.abs(e.matrix - np.eye(2) / math.sqrt(2.0))) <= 1e-6


def _check_limits():
    lo, hi = comparison_band(1.0, 2.0, 2)
    assert 0 < lo < hi
    _close(lo, v_psi(profile_of(1.0), 2) / v_psi(profile_of(2.0), 2),
           rel=1e-12)


def _check_ratio():
    _close(ratio_bound(1), 2.0 * math.e, rel=1e-12)
    _close(ratio_bound(2), math.e * math.sqrt(2.0 * math.pi), rel=1e-12)
    e = DEllipsoid(np.array([[0.8]]), 1.0, np.array([0.0]))
    f = EllipsoidalDensity(profile_of(0.0), e)
    _close(density_integral(f), 2.0 / 0.8, rel=1e-9)
    r = outer_integral_ratio(f, 0.0, SolverOptions(seed=2))
    assert abs(r - 1.0) <= 1e-3


def _check_serialize():
    f = MinOfDensity((
        EllipsoidalDensity(profile_of(2.0),
                           DEllipsoid(np.eye(2), 1.0, np.array([0.4, 0.0]))),
        GaussianDensity(DEllipsoid(np.eye(2), 1.0, np.array([-0.4, 0.0]))),
    ))
    doc = density_to_json(f)
    back = density_to_json(density_from_json(doc))
    assert doc == back
    e = DEllipsoid(np.eye(2), 1.0, np.zeros(2))
    from .core import SolveReport
    rep = SolveReport(e, 0.0, 2.0, (), -INF, 3, True)
    assert report_to_json(report_from_json(report_to_json(rep))) \
        == report_to_json(rep)


def _check_infeasibility():
    f = EllipsoidalDensity(profile_of(0.0),
                           DEllipsoid(np.eye(1), 1.0, np.zeros(1)))
    try:
        solve_lowner_s(f, INF)
        raise AssertionError("linear tail accepted a quadratic cover")
    except InfeasibleError:
        pass


CHECKS = [
    ("psi_family", _check_psi_family),
    ("integrals", _check_integrals),
    ("legendre", _check_legendre),
    ("core", _check_core),
    ("interpolation", _check_interpolation),
    ("lowner_solver", _check_lowner_solver),
    ("john_solver", _check_john_solver),
    ("mvee", _check_mvee),
    ("limits", _check_limits),
    ("ratio", _check_ratio),
    ("serialize", _check_serialize),
    ("infeasibility", _check_infeasibility),
]


def run_selftest(verbose: bool = False) -> dict:
    """Run every module suite; returns {"ok": bool, "results": [...]}."""
    results = []
    for name, fn in CHECKS:
        try:
            fn()
            results.append({"name": name, "ok": True})
            if verbose:
                print(f"ok   {name}")
        except Exception as exc:
            detail = "".join(traceback.format_exception_only(exc)).strip()
            results.append({"name": name, "ok": False, "detail": detail})
            if verbose:
                print(f"FAIL {name}: {detail}")
    return {"ok": all(r["ok"] for r in results), "results": results}
