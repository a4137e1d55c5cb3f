"""Shared construction helpers for the test suite."""
import numpy as np

from lownerlab.core import DEllipsoid


def spd_matrix(rng, d, lo=0.6, hi=1.8):
    """Random SPD matrix with eigenvalues drawn from [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = rng.uniform(lo, hi, size=d)
    return (q * eig) @ q.T


def random_triple(rng, d, centered=False, lo=0.6, hi=1.8):
    a = spd_matrix(rng, d, lo, hi)
    height = float(rng.uniform(0.7, 1.6))
    center = np.zeros(d) if centered else rng.uniform(-0.8, 0.8, size=d)
    return DEllipsoid(a, height, center)


def tensor_grid(lo, hi, n, d):
    axes = [np.linspace(lo, hi, n)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)
