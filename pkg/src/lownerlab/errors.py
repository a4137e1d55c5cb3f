"""Exception hierarchy shared across the package.

CLI exit codes: InfeasibleError -> 1, SchemaError -> 2, NumericalError -> 3.
"""
from __future__ import annotations


class LownerlabError(Exception):
    """Base class for package errors."""


class SchemaError(LownerlabError):
    """Malformed or inconsistent input description (JSON or constructor)."""


class InfeasibleError(LownerlabError):
    """No admissible dominating (or dominated) function exists.

    Carries an optional witness: a point or direction certifying the failure.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NumericalError(LownerlabError):
    """Numerical breakdown: solver failure or nonconvergent quadrature."""


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to reach the requested tolerance."""
