"""Photon collection from trapped atomic ensembles into Gaussian modes."""

from .paraxial_beam import BeamGeometry, ParaxialValidityWarning, Point3
from .ensemble_model import (
    FULL_GAUSSIAN,
    GOUY_COMPENSATED,
    PHASE_VARIANTS,
    UNIFORM,
    CloudGeometry,
    PhaseProfile,
    make_profile,
)
from .overlap_engine import (
    OverlapResult,
    compute_xi,
    geometric_factor,
    xi_brute_force,
    xi_full_compensation,
    xi_gouy_compensated,
    xi_small_cloud,
    xi_uniform,
)
from .special_math import QuadratureError, QuadratureRule, erfcx, gauss_hermite, integrate_adaptive

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BeamGeometry",
    "Point3",
    "ParaxialValidityWarning",
    "CloudGeometry",
    "PhaseProfile",
    "make_profile",
    "UNIFORM",
    "GOUY_COMPENSATED",
    "FULL_GAUSSIAN",
    "PHASE_VARIANTS",
    "OverlapResult",
    "compute_xi",
    "geometric_factor",
    "xi_small_cloud",
    "xi_uniform",
    "xi_gouy_compensated",
    "xi_full_compensation",
    "xi_brute_force",
    "QuadratureError",
    "QuadratureRule",
    "erfcx",
    "gauss_hermite",
    "integrate_adaptive",
]
