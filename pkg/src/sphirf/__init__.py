"""Intrinsic random functions on the sphere.

Spectral intrinsic covariances, universal kriging, RKHS smoothing splines
and their dual equivalence, band-limited simulation, and a
Legendre-coefficient check of thin-plate kernels.
"""
from .core_sphere import (
    Rotation,
    SphereQuadrature,
    SpherePoint,
    default_quadrature,
    gauss_sphere_quadrature,
    rotate,
    spherical_distance,
)
from .errors import (
    NonUnisolvent,
    NotAllowable,
    NumericalError,
    QuadratureOrderError,
    RankDeficientDesign,
    SingularSystem,
    TooFewSites,
    ValidationError,
)
from .harmonics import (
    DegreeSet,
    HarmonicIndex,
    assoc_legendre,
    harmonic_design_matrix,
    legendre_p,
    real_sph_harm,
    sph_harm_table,
)
from .kriging import KrigingProblem, KrigingSolution, UniversalKriging, predict_grid, solve_universal_kriging
from .measures import (
    SphericalMeasure,
    apply,
    is_allowable,
    kriging_measure,
    measure_covariance,
    rotate_measure,
)
from .rkhs_smoothing import (
    CardinalBasis,
    SmoothingFit,
    cardinal_basis,
    dual_kriging_equivalence,
    evaluate_fit,
    fit_smoothing_spline,
    reproducing_kernel,
    semi_norm_sq,
)
from .simulation import HarmonicField, empirical_stationarity_check, simulate_irf, truncate_field
from .spectral_model import (
    SpectralModel,
    cov_matrix,
    explicit_model,
    intrinsic_cov,
    power_law_model,
    validate_model,
)
from .tps_check import check_conditional_pd, legendre_coefficients, tps_kernel, wahba_kernel

__version__ = "0.1.0"
