"""Interpolation and the two center-merging constructions."""
import math

import numpy as np
import pytest

from lownerlab.core import (
    DEllipsoid,
    ellipsoidal_eval,
    ellipsoidal_integral,
    flat_bottom_profile,
    indicator_profile,
)
from lownerlab.errors import SchemaError
from lownerlab.integrals import v_psi
from lownerlab.interpolation import interpolate, sausage_bounded, sausage_increasing
from lownerlab.psi_family import profile_of

from helpers import spd_matrix, tensor_grid


def test_interpolation_fixed_point():
    e = DEllipsoid(np.diag([1.0, 2.0]), 1.3, np.array([0.2, -0.5]))
    out = interpolate(e, e, 0.37)
    assert np.allclose(out.matrix, e.matrix)
    assert out.height == pytest.approx(e.height)
    assert np.allclose(out.center, e.center)


def test_interpolation_symmetric_pair_centers_cancel():
    c = np.array([0.7, -0.2])
    e1 = DEllipsoid(np.eye(2), 0.8, c)
    e2 = DEllipsoid(np.eye(2), 0.8, -c)
    out = interpolate(e1, e2, 0.5)
    assert np.allclose(out.matrix, np.eye(2))
    assert out.height == pytest.approx(0.8)
    assert np.allclose(out.center, 0.0, atol=1e-12)


def test_interpolation_determinant_exceeds_geometric_mean():
    e1 = DEllipsoid(np.eye(2), 1.0, np.zeros(2))
    e2 = DEllipsoid(4.0 * np.eye(2), 1.0, np.zeros(2))
    out = interpolate(e1, e2, 0.5)
    assert np.allclose(out.matrix, 2.5 * np.eye(2))
    assert out.det() == pytest.approx(6.25)
    assert out.det() >= math.sqrt(e1.det() * e2.det()) + 2.0


def test_interpolation_pointwise_domination():
    rng = np.random.default_rng(31)
    profile = profile_of(2.0)
    e1 = DEllipsoid(spd_matrix(rng, 2), 1.1, np.array([0.3, -0.2]))
    e2 = DEllipsoid(spd_matrix(rng, 2), 0.7, np.array([-0.4, 0.1]))
    beta = 0.3
    out = interpolate(e1, e2, beta)
    pts = tensor_grid(-4.0, 4.0, 100, 2)
    v1 = ellipsoidal_eval(profile, e1, pts)
    v2 = ellipsoidal_eval(profile, e2, pts)
    ve = ellipsoidal_eval(profile, out, pts)
    assert np.all(v1 ** beta * v2 ** (1 - beta) <= ve * (1 + 1e-10) + 1e-300)


def test_interpolation_integral_inequality():
    rng = np.random.default_rng(32)
    vconst = v_psi(profile_of(2.0), 2)
    e1 = DEllipsoid(spd_matrix(rng, 2), 1.1, np.array([0.3, -0.2]))
    e2 = DEllipsoid(spd_matrix(rng, 2), 0.7, np.array([-0.4, 0.1]))
    beta = 0.4
    out = interpolate(e1, e2, beta)
    i1 = ellipsoidal_integral(e1, vconst)
    i2 = ellipsoidal_integral(e2, vconst)
    ie = ellipsoidal_integral(out, vconst)
    assert ie <= i1 ** beta * i2 ** (1 - beta) * (1 + 1e-12)

    # equality exactly when the matrices agree
    e3 = DEllipsoid(e1.matrix, 0.9, np.array([0.5, 0.5]))
    same = interpolate(e1, e3, beta)
    lhs = ellipsoidal_integral(same, vconst)
    rhs = ellipsoidal_integral(e1, vconst) ** beta * ellipsoidal_integral(e3, vconst) ** (1 - beta)
    assert lhs == pytest.approx(rhs, rel=1e-10)

    far = DEllipsoid(e1.matrix + 0.5 * np.eye(2), 1.1, e1.center)
    gap = interpolate(e1, far, 0.5)
    assert ellipsoidal_integral(gap, vconst) < (
        ellipsoidal_integral(e1, vconst) ** 0.5
        * ellipsoidal_integral(far, vconst) ** 0.5) * (1 - 1e-4)


class TestSausageIncreasing:
    def test_one_dimensional_closed_form(self):
        out = sausage_increasing(profile_of(0.0), np.eye(1), 1.0,
                                 np.array([1.0]), np.array([-1.0]))
        # infimum of |x+1|-|x| over the window is 1, halved twice
        assert out.matrix[0, 0] == pytest.approx(0.75, rel=1e-9)
        assert out.height == pytest.approx(math.exp(-0.5), rel=1e-9)
        assert np.allclose(out.center, 0.0, atol=1e-12)

    def test_one_dimensional_properties(self):
        profile = profile_of(0.0)
        a1, a2 = np.array([1.0]), np.array([-1.0])
        out = sausage_increasing(profile, np.eye(1), 1.0, a1, a2)
        e1 = DEllipsoid(np.eye(1), 1.0, a1)
        e2 = DEllipsoid(np.eye(1), 1.0, a2)
        vconst = v_psi(profile, 1)
        merged = ellipsoidal_integral(out, vconst)
        assert merged < min(ellipsoidal_integral(e1, vconst),
                            ellipsoidal_integral(e2, vconst))
        pts = np.linspace(-6.0, 6.0, 10001)[:, None]
        lo = np.minimum(ellipsoidal_eval(profile, e1, pts),
                        ellipsoidal_eval(profile, e2, pts))
        assert np.all(lo <= ellipsoidal_eval(profile, out, pts) * (1 + 1e-10))

    def test_two_dimensional_properties(self):
        rng = np.random.default_rng(33)
        profile = profile_of(2.0)
        a_mat = spd_matrix(rng, 2)
        a1 = np.array([0.6, 0.1])
        out = sausage_increasing(profile, a_mat, 1.2, a1, -a1)
        # shrink parameters are consistent between matrix and height
        shrink = 1.0 - np.linalg.eigvalsh(out.matrix)[-1] / np.linalg.eigvalsh(a_mat)[-1]
        assert 0.0 < shrink <= 0.5
        assert out.height == pytest.approx(1.2 * math.exp(-2 * 2 * shrink), rel=1e-6)

        e1 = DEllipsoid(a_mat, 1.2, a1)
        e2 = DEllipsoid(a_mat, 1.2, -a1)
        vconst = v_psi(profile, 2)
        assert ellipsoidal_integral(out, vconst) < ellipsoidal_integral(e1, vconst)
        pts = tensor_grid(-5.0, 5.0, 100, 2)
        lo = np.minimum(ellipsoidal_eval(profile, e1, pts),
                        ellipsoidal_eval(profile, e2, pts))
        assert np.all(lo <= ellipsoidal_eval(profile, out, pts) * (1 + 1e-10) + 1e-300)

    def test_flat_profile_rejected(self):
        with pytest.raises(SchemaError):
            sausage_increasing(flat_bottom_profile(5.0), np.eye(1), 1.0,
                               np.array([1.0]), np.array([-1.0]))


class TestSausageBounded:
    def test_stretch_branch(self):
        out = sausage_bounded(indicator_profile(1.0), np.eye(2), 1.0,
                              np.array([0.5, 0.0]), np.array([-0.5, 0.0]))
        assert np.allclose(out.matrix, np.diag([2.0, 1.0]), atol=1e-12)
        assert np.allclose(out.center, 0.0, atol=1e-12)
        # determinant doubles, integral halves
        vconst = v_psi(indicator_profile(1.0), 2)
        e1 = DEllipsoid(np.eye(2), 1.0, np.array([0.5, 0.0]))
        assert ellipsoidal_integral(out, vconst) == pytest.approx(
            0.5 * ellipsoidal_integral(e1, vconst))

    def test_stretch_axis_follows_center_direction(self):
        u = np.array([1.0, 1.0]) / math.sqrt(2.0)
        out = sausage_bounded(indicator_profile(1.0), np.eye(2), 1.0, 0.5 * u, -0.5 * u)
        eig, vec = np.linalg.eigh(out.matrix)
        assert eig[-1] == pytest.approx(2.0, rel=1e-9)
        assert eig[0] == pytest.approx(1.0, rel=1e-9)
        assert abs(vec[:, -1] @ u) == pytest.approx(1.0, abs=1e-9)

    def test_domination_on_grid(self):
        profile = indicator_profile(1.0)
        a1 = np.array([0.5, 0.0])
        out = sausage_bounded(profile, np.eye(2), 1.0, a1, -a1)
        e1 = DEllipsoid(np.eye(2), 1.0, a1)
        e2 = DEllipsoid(np.eye(2), 1.0, -a1)
        pts = tensor_grid(-1.6, 1.6, 100, 2)
        lo = np.minimum(ellipsoidal_eval(profile, e1, pts),
                        ellipsoidal_eval(profile, e2, pts))
        assert np.all(lo <= ellipsoidal_eval(profile, out, pts) + 1e-300)

    def test_disjoint_branch(self):
        out = sausage_bounded(indicator_profile(1.0), np.eye(2), 1.0,
                              np.array([2.0, 0.0]), np.array([-2.0, 0.0]))
        assert np.allclose(out.matrix, 2.0 * np.eye(2))
