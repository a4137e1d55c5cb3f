"""Parameter triples, density classes, and the pointwise domination oracle."""
import math

import numpy as np
import pytest

from lownerlab.core import (
    CoverDensity,
    DEllipsoid,
    EllipsoidalDensity,
    GaugePowerDensity,
    GaussianDensity,
    HeightDensity,
    MinOfDensity,
    check_admissible,
    ellipsoidal_eval,
    ellipsoidal_integral,
    flat_bottom_profile,
    indicator_profile,
    is_below,
    violation_search,
)
from lownerlab.errors import SchemaError
from lownerlab.psi_family import profile_of

SQUARE = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def unit_exp(d=1):
    return EllipsoidalDensity(profile_of(0.0), DEllipsoid(np.eye(d), 1.0, np.zeros(d)))


class TestDEllipsoid:
    def test_algebra(self):
        e = DEllipsoid(np.diag([2.0, 3.0]), 1.5, np.zeros(2))
        assert e.det() == pytest.approx(6.0)
        assert np.allclose(e.eigvals(), [2.0, 3.0])
        assert np.allclose(e.inv(), np.diag([0.5, 1 / 3]))

    def test_validation(self):
        with pytest.raises(SchemaError):
            DEllipsoid(np.array([[1.0, 0.5], [0.0, 1.0]]), 1.0, np.zeros(2))
        with pytest.raises(SchemaError):
            DEllipsoid(np.array([[-1.0]]), 1.0, np.zeros(1))
        with pytest.raises(SchemaError):
            DEllipsoid(np.eye(1), -2.0, np.zeros(1))
        with pytest.raises(SchemaError):
            DEllipsoid(np.eye(2), 1.0, np.zeros(3))


class TestProfiles:
    def test_indicator(self):
        p = indicator_profile(2.0)
        assert p.domain_bound == 2.0
        assert not p.strictly_increasing
        assert p.eval(np.array([1.9]))[0] == 0.0
        assert math.isinf(p.eval(np.array([2.1]))[0])

    def test_flat_bottom(self):
        p = flat_bottom_profile(1.0, slope=2.0)
        assert p.eval(np.array([0.5]))[0] == 0.0
        assert p.eval(np.array([3.0]))[0] == pytest.approx(4.0)
        assert not p.strictly_increasing

    def test_admissibility_gate(self):
        assert check_admissible(profile_of(1.0))
        bad = profile_of(1.0)
        bad = type(bad)(eval=lambda t: np.cos(np.asarray(t)), domain_bound=math.inf,
                        growth_slope=1.0, strictly_increasing=True, name="cosine")
        with pytest.raises(SchemaError):
            check_admissible(bad)
        assert not check_admissible(bad, raise_on_fail=False)


class TestEvaluation:
    def test_pointwise_value(self):
        e = DEllipsoid(np.array([[2.0]]), 3.0, np.array([1.0]))
        got = ellipsoidal_eval(profile_of(0.0), e, np.array([2.0]))
        assert float(got) == pytest.approx(3.0 * math.exp(-2.0), rel=1e-14)

    def test_integral_from_volume_constant(self):
        e = DEllipsoid(np.diag([1.0, 2.0]), 3.0, np.array([0.4, -0.1]))
        assert ellipsoidal_integral(e, 5.0) == pytest.approx(7.5)


class TestDensities:
    def test_gaussian(self):
        e = DEllipsoid(np.diag([1.3]), 2.0, np.array([0.3]))
        f = GaussianDensity(e)
        assert f.phi(np.array([1.0])) == pytest.approx((1.3 * 0.7) ** 2)
        assert f.sup_norm == 2.0
        assert np.allclose(f.mode, [0.3])
        assert math.isinf(f.tail_slope(np.array([1.0])))
        assert f.quad_rate(np.array([1.0])) == pytest.approx(1.3 ** 2)

    def test_ellipsoidal(self):
        f = unit_exp()
        assert f.value(np.array([1.0])) == pytest.approx(math.exp(-1.0))
        assert f.tail_slope(np.array([1.0])) == pytest.approx(1.0)
        assert math.isinf(f.quad_rate(np.array([1.0])))

    def test_min_of(self):
        parts = (GaussianDensity(DEllipsoid(np.eye(1), 1.0, np.array([1.0]))),
                 GaussianDensity(DEllipsoid(np.eye(1), 1.0, np.array([-1.0]))))
        f = MinOfDensity(parts)
        x = np.array([0.4])
        assert f.value(x) == pytest.approx(min(p.value(x) for p in parts))
        assert f.phi(x) == pytest.approx(max(p.phi(x) for p in parts))
        assert abs(f.mode[0]) <= 1e-6
        assert f.sup_norm == pytest.approx(math.exp(-1.0), rel=1e-6)

    def test_cover(self):
        parts = (unit_exp(),
                 EllipsoidalDensity(profile_of(0.0),
                                    DEllipsoid(np.eye(1), 0.5, np.array([2.0]))))
        f = CoverDensity(parts)
        x = np.array([1.2])
        assert f.value(x) == pytest.approx(max(p.value(x) for p in parts))
        assert f.sup_norm == 1.0
        # tail runs along the slowest part
        assert f.tail_slope(np.array([1.0])) == pytest.approx(1.0)

    def test_gauge_power(self):
        f = GaugePowerDensity(SQUARE, 2.0, 1.5)
        assert f.gauge(np.array([2.0, 0.0])) == pytest.approx(2.0)
        assert f.gauge(np.array([1.0, 1.0])) == pytest.approx(1.0)
        assert f.value(np.array([2.0, 0.0])) == pytest.approx(1.5 * math.exp(-4.0))
        assert f.volume() == pytest.approx(4.0)
        assert not f.support_bounded()
        assert f.quad_rate(np.array([1.0, 0.0])) == pytest.approx(1.0)

    def test_height(self):
        f = HeightDensity(2.0, DEllipsoid(np.eye(1), 1.0, np.zeros(1)))
        assert f.value(np.array([0.6])) == pytest.approx(0.64)
        assert f.support_bounded()
        assert f.support_radius() == pytest.approx(1.0)
        assert f.value(np.array([1.4])) == 0.0


class TestDomination:
    def test_true_cover_certified(self):
        f = unit_exp()
        cover = DEllipsoid(np.array([[0.9]]), 1.2, np.zeros(1))
        cert = is_below(f, profile_of(0.0), cover)
        assert cert.holds
        assert cert.margin <= 1e-9

    def test_tail_violation_found(self):
        f = unit_exp()
        bad = DEllipsoid(np.array([[1.1]]), 1.0, np.zeros(1))
        cert = is_below(f, profile_of(0.0), bad)
        assert not cert.holds
        assert cert.margin > 0
        assert cert.witness is not None

    def test_violation_search_ordering(self):
        f = unit_exp()
        bad = DEllipsoid(np.array([[1.3]]), 0.9, np.zeros(1))
        best, top, evals, done = violation_search(f, profile_of(0.0), bad, topk=4)
        assert best > 0
        assert len(top) >= 1
        vals = [v for v, _ in top]
        assert vals == sorted(vals, reverse=True)
        assert best == pytest.approx(vals[0])
        assert evals > 0 and done
