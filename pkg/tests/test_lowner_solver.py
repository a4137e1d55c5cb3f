"""Covering solver: recoveries, benchmark, equivariance, infeasibility."""
import math

import numpy as np
import pytest

from lownerlab.core import CoverDensity, DEllipsoid, EllipsoidalDensity, GaussianDensity
from lownerlab.errors import InfeasibleError, SchemaError
from lownerlab.lowner_solver import (
    SolverOptions,
    derive_box,
    height_bound_check,
    initial_cover,
    solve_lowner,
    solve_lowner_s,
)
from lownerlab.psi_family import profile_of


def exp_pair():
    mk = lambda c: EllipsoidalDensity(profile_of(0.0),
                                      DEllipsoid(np.eye(1), 1.0, np.array([c])))
    return CoverDensity((mk(1.0), mk(-1.0)))


def test_envelope_benchmark():
    rep = solve_lowner_s(exp_pair(), 0.0)
    assert rep.converged
    assert rep.integral == pytest.approx(2 * math.e, rel=1e-6)
    assert rep.optimum.matrix[0, 0] == pytest.approx(1.0, abs=1e-6)
    assert rep.optimum.height == pytest.approx(math.e, rel=1e-6)
    assert abs(rep.optimum.center[0]) <= 1e-6
    assert rep.max_violation <= 1e-7


def test_in_class_recovery():
    e = DEllipsoid(np.array([[1.3]]), 0.8, np.array([0.4]))
    f = EllipsoidalDensity(profile_of(1.0), e)
    rep = solve_lowner_s(f, 1.0)
    assert rep.converged
    assert rep.optimum.matrix[0, 0] == pytest.approx(1.3, rel=1e-6)
    assert rep.optimum.height == pytest.approx(0.8, rel=1e-6)
    assert rep.optimum.center[0] == pytest.approx(0.4, abs=1e-6)
    assert height_bound_check(rep, f)


def test_translation_equivariance():
    base = GaussianDensity(DEllipsoid(np.array([[1.2]]), 1.0, np.zeros(1)))
    moved = GaussianDensity(DEllipsoid(np.array([[1.2]]), 1.0, np.array([0.9])))
    r0 = solve_lowner_s(base, 2.0)
    r1 = solve_lowner_s(moved, 2.0)
    assert np.allclose(r0.optimum.matrix, r1.optimum.matrix, atol=1e-6)
    assert r0.optimum.height == pytest.approx(r1.optimum.height, abs=1e-6)
    assert r1.optimum.center[0] - r0.optimum.center[0] == pytest.approx(0.9, abs=1e-6)


def test_seed_agreement():
    f = exp_pair()
    a = solve_lowner_s(f, 0.0, SolverOptions(seed=0))
    b = solve_lowner_s(f, 0.0, SolverOptions(seed=1))
    assert a.optimum.matrix[0, 0] == pytest.approx(b.optimum.matrix[0, 0], abs=1e-5)
    assert a.optimum.height == pytest.approx(b.optimum.height, rel=1e-5)
    assert a.optimum.center[0] == pytest.approx(b.optimum.center[0], abs=1e-5)


def test_initial_cover_is_certified():
    f = exp_pair()
    e, cert = initial_cover(f, profile_of(0.0))
    assert cert.holds
    assert e.height >= f.sup_norm * (1 - 1e-9)


def test_derived_box_contains_truth():
    from lownerlab.integrals import v_psi

    e = DEllipsoid(np.array([[1.3]]), 0.8, np.array([0.4]))
    f = EllipsoidalDensity(profile_of(1.0), e)
    e0, _ = initial_cover(f, profile_of(1.0))
    delta = e0.height / e0.det() * v_psi(profile_of(1.0), 1)
    box = derive_box(f, profile_of(1.0), 1, delta=delta,
                     init_gamma=float(e0.eigvals()[0]))
    assert box.eig_lo <= 1.3 <= box.eig_hi
    assert box.alpha_lo <= 0.8 <= box.alpha_hi
    assert box.alpha_hi <= math.exp(1) * f.sup_norm * 1.1


def test_quadratic_order_rejects_exponential_tails():
    f = EllipsoidalDensity(profile_of(0.0), DEllipsoid(np.eye(1), 1.0, np.zeros(1)))
    with pytest.raises(InfeasibleError):
        solve_lowner_s(f, math.inf)


def test_report_metadata():
    rep = solve_lowner_s(exp_pair(), 0.0)
    assert rep.side == "lowner"
    assert rep.iterations >= 1
    assert len(rep.active_points) >= 1
    assert rep.objective == pytest.approx(
        math.log(rep.optimum.height) - math.log(rep.optimum.det()), rel=1e-9)


def test_options_validation():
    with pytest.raises(SchemaError):
        SolverOptions(feasibility_tol=-1.0)
    with pytest.raises(SchemaError):
        SolverOptions(objective_tol=0.0)
    with pytest.raises(SchemaError):
        SolverOptions(max_outer_iterations=0)


def test_profile_route_matches_order_route():
    f = exp_pair()
    a = solve_lowner_s(f, 0.0)
    b = solve_lowner(f, profile_of(0.0))
    assert a.integral == pytest.approx(b.integral, rel=1e-9)
