"""Covering and inscribed profile optimization over log-concave densities.

The covering solver finds the minimal-integral affine position of a radial
profile above a given density; the inscribed solver finds the maximal
height function below it. Around them: the psi_s profile family, volume
constants, conjugation checks, interpolation and shrink constructions,
centered enclosing ellipsoids, limit studies along s, and integral-ratio
diagnostics.
"""
from .core import (INF, AdmissibleProfile, Certificate, CoverDensity,
                   DEllipsoid, EllipsoidalDensity, GaugePowerDensity,
                   GaussianDensity, HeightDensity, LogDensity, MinOfDensity,
                   SolveReport, check_admissible, flat_bottom_profile,
                   indicator_profile, is_below, violation_search)
from .errors import (InfeasibleError, LownerlabError, NumericalError,
                     QuadratureError, SchemaError)
from .integrals import (QuadratureSpec, lambda1, tricomi_u, unit_ball_volume,
                        v_psi, v_psi_s_closed, w_s)
from .interpolation import interpolate, sausage_bounded, sausage_increasing
from .john_solver import (even_duality_check, john_violation_search,
                          solve_john_s, support_gaps)
from .legendre import (NumericPolarDensity, duality_check, eta_s, h_eval,
                       legendre_profile, mahler_identity_check, polar_density)
from .limits import (SCurve, adjacent_band_check, comparison_band,
                     gaussian_limit, s_curve, zero_limit_check)
from .lowner_solver import (SolverOptions, chimera_demo, derive_box,
                            height_bound_check, initial_cover, solve_lowner,
                            solve_lowner_s)
from .mvee import john_decomposition, lowner_infty_of_gauge, mvee_centered
from .psi_family import (profile_of, psi_s_derivative, psi_s_eval,
                         scaled_monotonicity_check)
from .ratio import (density_integral, outer_integral_ratio, ratio_bound,
                    ratio_bound_s, ratio_corpus_report)
from .selftest import run_selftest
from .serialize import (curve_csv, density_from_json, density_to_json,
                        report_from_json, report_to_json)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AdmissibleProfile",
    "Certificate",
    "CoverDensity",
    "DEllipsoid",
    "EllipsoidalDensity",
    "GaugePowerDensity",
    "GaussianDensity",
    "HeightDensity",
    "LogDensity",
    "MinOfDensity",
    "SolveReport",
    "check_admissible",
    "flat_bottom_profile",
    "indicator_profile",
    "is_below",
    "violation_search",
    "InfeasibleError",
    "LownerlabError",
    "NumericalError",
    "QuadratureError",
    "SchemaError",
    "QuadratureSpec",
    "lambda1",
    "tricomi_u",
    "unit_ball_volume",
    "v_psi",
    "v_psi_s_closed",
    "w_s",
    "interpolate",
    "sausage_bounded",
    "sausage_increasing",
    "even_duality_check",
    "john_violation_search",
    "solve_john_s",
    "support_gaps",
    "NumericPolarDensity",
    "duality_check",
    "eta_s",
    "h_eval",
    "legendre_profile",
    "mahler_identity_check",
    "polar_density",
    "SCurve",
    "adjacent_band_check",
    "comparison_band",
    "gaussian_limit",
    "s_curve",
    "zero_limit_check",
    "SolverOptions",
    "chimera_demo",
    "derive_box",
    "height_bound_check",
    "initial_cover",
    "solve_lowner",
    "solve_lowner_s",
    "john_decomposition",
    "lowner_infty_of_gauge",
    "mvee_centered",
    "profile_of",
    "psi_s_derivative",
    "psi_s_eval",
    "scaled_monotonicity_check",
    "density_integral",
    "outer_integral_ratio",
    "ratio_bound",
    "ratio_bound_s",
    "ratio_corpus_report",
    "run_selftest",
    "curve_csv",
    "density_from_json",
    "density_to_json",
    "report_from_json",
    "report_to_json",
    "__version__",
]
