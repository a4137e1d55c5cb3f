"""Centered enclosing ellipsoid, contact decomposition, gauge covering."""
import math

import numpy as np
import pytest

from lownerlab.errors import SchemaError
from lownerlab.mvee import john_decomposition, lowner_infty_of_gauge, mvee_centered

SQUARE = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def symmetric_cloud(rng, d, n=14):
    x = rng.standard_normal((n, d)) * rng.uniform(0.5, 2.0, size=d)
    return np.vstack([x, -x])


def test_square_maps_to_half_identity():
    m = mvee_centered(SQUARE)
    assert np.allclose(m, 0.5 * np.eye(2), atol=1e-8)


def test_diamond_axes():
    pts = np.array([[math.sqrt(2.0), 0.0], [-math.sqrt(2.0), 0.0],
                    [0.0, 1.0], [0.0, -1.0]])
    m = mvee_centered(pts)
    assert np.allclose(m, np.diag([0.5, 1.0]), atol=1e-7)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_cloud_enclosure_and_contacts(d):
    rng = np.random.default_rng(100 + d)
    pts = symmetric_cloud(rng, d)
    m = mvee_centered(pts)
    quad = np.einsum("ij,jk,ik->i", pts, m, pts)
    assert np.max(quad) <= 1.0 + 1e-7

    weights, contacts = john_decomposition(pts, m)
    assert np.all(weights >= -1e-10)
    assert abs(weights.sum() - d) <= 1e-6
    ident = np.einsum("i,ij,ik->jk", weights, contacts, contacts)
    assert np.linalg.norm(ident - np.eye(d)) <= 1e-6
    assert np.allclose(np.linalg.norm(contacts, axis=1), 1.0, atol=1e-7)


def test_rank_deficient_rejected():
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [2.0, 0.0], [-2.0, 0.0]])
    with pytest.raises(SchemaError):
        mvee_centered(pts)


def test_gauge_covering_square():
    e = lowner_infty_of_gauge(SQUARE, 2)
    assert np.allclose(e.matrix, np.eye(2) / math.sqrt(2.0), atol=1e-9)
    assert e.height == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(e.center, 0.0, atol=1e-12)


def test_gauge_covering_rectangle():
    rect = SQUARE * np.array([2.0, 1.0])
    e = lowner_infty_of_gauge(rect, 2)
    assert np.allclose(e.matrix, np.diag([1 / (2 * math.sqrt(2.0)), 1 / math.sqrt(2.0)]),
                       atol=1e-8)
