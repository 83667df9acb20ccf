"""Arakelov-Zhang pairing <x^2, phi> for polynomials over Q."""

__version__ = "0.1.0"

from .config import RunConfig
from .heights import (
    HeightEstimate,
    ProjPoint,
    canonical_height,
    is_preperiodic,
    log_mahler_measure,
    sum_root_heights,
    telescoping_constant,
    weil_height,
)
from .measure import IntegralEstimate, MeasureSample, backward_sample, default_beta, local_integral_arch
from .newton import (
    has_good_reduction,
    local_integral_nonarch,
    local_integral_series,
    newton_polygon,
    root_valuations,
    satisfies_disjointness_condition,
)
from .pairing import (
    EqualityCase,
    Method,
    PairingReport,
    conjugated_squaring_pairing,
    equality_certificate,
    height_difference_bound,
    pairing_via_preimages,
    pairing_via_theorem1,
    quad_family_bounds,
    rigidity_check,
)
from .polynomial import PolyQ, iterate, parse_poly, to_primitive
from .quadrature import I_integral, chebyshev_integral, dirichlet_L_chi3
from .rational import Place, valuation
from .roots import RootCluster, complex_roots
