"""Conjugation machinery: radial duals, inscribed heights, product identity."""
import math

import numpy as np
import pytest

from lownerlab.core import AdmissibleProfile, DEllipsoid, GaussianDensity, indicator_profile
from lownerlab.legendre import (
    duality_check,
    eta_s,
    h_eval,
    legendre_profile,
    mahler_identity_check,
    polar_density,
)
from lownerlab.psi_family import profile_of

UNIT1 = DEllipsoid(np.eye(1), 1.0, np.zeros(1))


def quadratic_profile(scale):
    return AdmissibleProfile(eval=lambda t, c=scale: c * np.asarray(t, dtype=float) ** 2,
                             domain_bound=math.inf, growth_slope=math.inf,
                             strictly_increasing=True, name=f"quad{scale}")


def test_dual_exponent_anchors():
    assert eta_s(2.0, 0.5) == pytest.approx(-math.log(0.75), rel=1e-14)
    assert eta_s(0.0, 0.5) == 0.0
    assert math.isinf(eta_s(0.0, 1.2))
    assert eta_s(math.inf, 0.7) == pytest.approx(0.49, rel=1e-14)


def test_inscribed_height_values():
    assert h_eval(2.0, UNIT1, np.array([0.6])) == pytest.approx(0.64, rel=1e-12)
    assert h_eval(0.0, UNIT1, np.array([0.5])) == 1.0
    assert h_eval(0.0, UNIT1, np.array([1.2])) == 0.0
    assert h_eval(math.inf, UNIT1, np.array([0.7])) == pytest.approx(
        math.exp(-0.49), rel=1e-12)


def test_inscribed_height_log_concavity():
    rng = np.random.default_rng(5)
    e = DEllipsoid(np.array([[1.4, 0.2], [0.2, 0.9]]), 1.3, np.zeros(2))
    for _ in range(50):
        x, y = rng.uniform(-0.5, 0.5, size=(2, 2))
        hx = h_eval(2.0, e, x)
        hy = h_eval(2.0, e, y)
        hm = h_eval(2.0, e, 0.5 * (x + y))
        assert math.sqrt(hx * hy) <= hm * (1 + 1e-12)


def test_self_dual_profile():
    dual = legendre_profile(quadratic_profile(0.5))
    for r in (0.0, 0.7, 1.3, 2.4):
        assert float(dual.eval(np.array([r]))[0]) == pytest.approx(0.5 * r * r, abs=1e-9)


def test_quadratic_dual_scaling():
    dual = legendre_profile(profile_of(math.inf))
    for r in (0.5, 1.0, 2.0):
        assert float(dual.eval(np.array([r]))[0]) == pytest.approx(r * r / 4, abs=1e-9)


def test_indicator_dual_is_linear():
    dual = legendre_profile(indicator_profile(1.0))
    for r in (0.0, 0.8, 2.5):
        assert float(dual.eval(np.array([r]))[0]) == pytest.approx(r, abs=1e-8)


def test_order_reversal():
    lo = quadratic_profile(0.5)
    hi = quadratic_profile(1.0)
    dual_lo = legendre_profile(lo)
    dual_hi = legendre_profile(hi)
    for r in (0.3, 1.0, 2.2):
        a = float(dual_hi.eval(np.array([r]))[0])
        b = float(dual_lo.eval(np.array([r]))[0])
        assert a <= b + 1e-10


def test_biconjugation_recovers_profile():
    p = profile_of(2.0)
    back = legendre_profile(legendre_profile(p))
    for t in (0.3, 1.0, 2.7):
        assert float(back.eval(np.array([t]))[0]) == pytest.approx(
            float(p.eval(np.array([t]))[0]), abs=1e-6)


@pytest.mark.parametrize("s", [0.0, 1.0, 2.0, math.inf])
def test_polar_pair_residual(s):
    e = DEllipsoid(np.diag([1.0, 2.0]), 1.5, np.zeros(2))
    assert duality_check(s, e) <= 1e-5


def test_polar_pair_residual_one_dimensional():
    e = DEllipsoid(np.array([[1.3]]), 0.9, np.zeros(1))
    assert duality_check(1.0, e) <= 1e-5


def test_product_identity():
    assert mahler_identity_check(1.0, DEllipsoid(2 * np.eye(2), 5.0, np.zeros(2))) <= 1e-5
    assert mahler_identity_check(0.0, DEllipsoid(np.diag([1.0, 3.0]), 0.5, np.zeros(2))) <= 1e-5


def test_polar_of_gaussian():
    f = GaussianDensity(DEllipsoid(np.eye(2), 1.0, np.zeros(2)))
    polar = polar_density(f)
    # conjugate of |x|^2 is |y|^2/4
    assert polar.phi(np.array([0.8, 0.0])) == pytest.approx(0.16, abs=1e-6)
    assert polar.phi(np.array([0.0, 0.0])) == pytest.approx(0.0, abs=1e-9)
