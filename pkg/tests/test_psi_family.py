"""Profile family: closed-form anchors, calculus, and shape properties."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lownerlab.errors import SchemaError
from lownerlab.psi_family import (
    profile_of,
    psi_s_derivative,
    psi_s_eval,
    scaled_monotonicity_check,
)

# psi_2(sqrt(3)) = 1 - log(3/2), worked out by hand from the s=2 formula
PSI2_SQRT3 = 0.59453489189183562


def test_closed_form_anchor_s2():
    got = psi_s_eval(2.0, math.sqrt(3.0))
    assert got == pytest.approx(PSI2_SQRT3, rel=1e-14)
    assert got == pytest.approx(1.0 - math.log(1.5), rel=1e-14)


def test_limiting_members():
    t = np.array([0.0, 0.3, 1.0, 4.7, 25.0])
    assert np.allclose(psi_s_eval(0.0, t), t, rtol=1e-15, atol=0.0)
    assert np.allclose(psi_s_eval(math.inf, t), t * t, rtol=1e-15, atol=0.0)


def test_small_argument_series():
    # psi_s(t) = t^2/s * (1 + O((t/s)^2)) near zero
    for s in (0.5, 1.0, 3.0, 50.0):
        t = 1e-9
        assert psi_s_eval(s, t) == pytest.approx(t * t / s, rel=1e-12)


def test_large_s_matches_quadratic_scaling():
    # far from the crossover the finite-s value tracks t^2/s
    assert psi_s_eval(1e6, 1e3) == pytest.approx(1.0, rel=1e-5)


def test_small_s_approaches_linear():
    # gap to the slope-1 asymptote is (s/2) log(4t/s), tiny for small s
    assert psi_s_eval(1e-8, 2.5) == pytest.approx(2.5, abs=1e-6)


def test_derivative_matches_difference_quotient():
    for s in (0.5, 2.0, 7.0, 1e3):
        for t in (0.3, 1.7, 9.0):
            h = 1e-6 * max(1.0, t)
            num = (psi_s_eval(s, t + h) - psi_s_eval(s, t - h)) / (2 * h)
            assert psi_s_derivative(s, t) == pytest.approx(num, rel=1e-7)


def test_derivative_limit_members():
    assert psi_s_derivative(0.0, 3.3) == pytest.approx(1.0)
    assert psi_s_derivative(math.inf, 3.3) == pytest.approx(6.6)
    assert psi_s_derivative(2.0, 0.0) == 0.0


@given(
    s=st.floats(min_value=0.05, max_value=200.0),
    t1=st.floats(min_value=0.0, max_value=40.0),
    t2=st.floats(min_value=0.0, max_value=40.0),
)
def test_midpoint_convexity(s, t1, t2):
    mid = psi_s_eval(s, 0.5 * (t1 + t2))
    avg = 0.5 * (psi_s_eval(s, t1) + psi_s_eval(s, t2))
    assert mid <= avg + 1e-10


@given(
    s=st.floats(min_value=0.05, max_value=200.0),
    t1=st.floats(min_value=0.0, max_value=40.0),
    dt=st.floats(min_value=0.0, max_value=10.0),
)
def test_monotone_in_argument(s, t1, dt):
    assert psi_s_eval(s, t1) <= psi_s_eval(s, t1 + dt) + 1e-12


def test_monotone_in_order_on_grid():
    for t in (0.4, 1.0, 1.7, 6.0, 30.0):
        assert scaled_monotonicity_check(t, (0.5, 1.0, 2.0, 8.0, 64.0))


def test_profile_of_fields():
    p = profile_of(2.0)
    assert p.s == 2.0
    assert p.strictly_increasing
    assert p.growth_slope == 1.0
    assert math.isinf(p.domain_bound)

    q = profile_of(math.inf)
    assert math.isinf(q.s)
    assert math.isinf(q.growth_slope)

    lin = profile_of(0.0)
    assert lin.growth_slope == 1.0
    assert lin.eval(np.array([2.0]))[0] == pytest.approx(2.0)


def test_profile_eval_vectorized():
    p = profile_of(1.5)
    t = np.linspace(0.0, 5.0, 17)
    out = p.eval(t)
    assert out.shape == t.shape
    assert np.all(np.diff(out) >= -1e-14)


def test_profile_inverse_round_trip():
    p = profile_of(2.0)
    level = float(p.eval(np.array([1.7]))[0])
    assert p.inverse(level) == pytest.approx(1.7, rel=1e-6)


def test_negative_order_rejected():
    with pytest.raises(SchemaError):
        profile_of(-1.0)
