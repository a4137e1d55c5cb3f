"""Volume constants: quadrature vs closed forms, special-function anchors."""
import math

import numpy as np
import pytest
import scipy.special as sp

from lownerlab.core import flat_bottom_profile, indicator_profile
from lownerlab.integrals import (
    QuadratureSpec,
    lambda1,
    tricomi_u,
    unit_ball_volume,
    v_psi,
    v_psi_s_closed,
    w_s,
)
from lownerlab.psi_family import profile_of

# mpmath references for the closed-form table, 12 significant digits
V_CLOSED_REF = {
    (0.5, 1): 2.97107446362, (1.0, 1): 3.54490770181, (2.0, 1): 4.41677005233,
    (8.0, 1): 7.64519440688, (100.0, 1): 25.2502794313,
    (0.5, 2): 11.1389426174, (1.0, 2): 14.9472962125, (2.0, 2): 21.9911485751,
    (8.0, 2): 61.1996975135, (100.0, 2): 640.655321566,
    (0.5, 3): 49.5997339645, (1.0, 3): 72.3882639588, (2.0, 3): 121.285794337,
    (8.0, 3): 511.426067603, (100.0, 3): 16332.6264306,
}

FACTORIAL_BALL = {1: 2.0, 2: 2 * math.pi, 3: 8 * math.pi, 4: 12 * math.pi ** 2}


def test_unit_ball_volume():
    expect = {1: 2.0, 2: math.pi, 3: 4 * math.pi / 3, 4: math.pi ** 2 / 2}
    for d, v in expect.items():
        assert unit_ball_volume(d) == pytest.approx(v, rel=1e-12)


def test_linear_profile_volume_is_factorial_times_ball():
    lin = profile_of(0.0)
    for d, v in FACTORIAL_BALL.items():
        assert v_psi(lin, d) == pytest.approx(v, rel=1e-8)


def test_quadratic_profile_volume_is_gaussian():
    quad = profile_of(math.inf)
    for d in range(1, 5):
        assert v_psi(quad, d) == pytest.approx(math.pi ** (d / 2), rel=1e-10)


def test_closed_form_table():
    for (s, d), ref in V_CLOSED_REF.items():
        assert v_psi_s_closed(s, d) == pytest.approx(ref, rel=1e-9)


def test_quadrature_agrees_with_closed_form():
    for s, d in ((1.0, 2), (2.0, 3), (8.0, 1), (0.5, 2)):
        assert v_psi(profile_of(s), d) == pytest.approx(v_psi_s_closed(s, d), rel=1e-8)


def test_closed_form_scales_linearly_at_large_order():
    # V(psi_s, 2)/s -> 2*pi
    assert v_psi_s_closed(1e4, 2) / 1e4 == pytest.approx(2 * math.pi, rel=0.02)


def test_tricomi_anchors():
    assert tricomi_u(1.0, 2.0, 2.0) == pytest.approx(0.5, rel=1e-12)
    # U(1;1;1) = e*E_1(1)
    assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(0.59634736232319407, rel=1e-12)


def test_tricomi_against_scipy():
    for a in (0.5, 1.5, 3.0):
        for b in (0.5, 2.5):
            for z in (0.7, 5.0):
                assert tricomi_u(a, b, z) == pytest.approx(
                    float(sp.hyperu(a, b, z)), rel=1e-8)


def test_dual_weight_anchors():
    assert w_s(0.0, 2) == pytest.approx(math.pi, rel=1e-12)
    assert w_s(2.0, 2) == pytest.approx(math.pi / 2, rel=1e-12)
    assert w_s(1.0, 1) == pytest.approx(math.pi / 2, rel=1e-12)
    assert w_s(math.inf, 3) == pytest.approx(math.pi ** 1.5, rel=1e-12)


def test_one_dimensional_constant():
    assert lambda1(profile_of(0.0)) == pytest.approx(2.0, rel=1e-10)
    assert lambda1(profile_of(math.inf)) == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_bounded_profiles():
    assert v_psi(indicator_profile(1.0), 2) == pytest.approx(math.pi, rel=1e-8)
    assert v_psi(indicator_profile(2.0), 1) == pytest.approx(4.0, rel=1e-8)
    # flat on [0,1] then slope 1: 2*(1 + integral of e^{-t}) in d=1
    assert v_psi(flat_bottom_profile(1.0), 1) == pytest.approx(4.0, rel=1e-8)


def test_quadrature_spec_is_honored():
    spec = QuadratureSpec(rel_tol=1e-6)
    assert v_psi(profile_of(1.0), 2, spec) == pytest.approx(
        V_CLOSED_REF[(1.0, 2)], rel=1e-5)
