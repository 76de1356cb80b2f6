"""Interpolated metrics on finite compatible pairs of metric spaces."""

from .functionals import h_cost, jm, jm_matrix, km, km_matrix, km_profile
from .interp_jmprime import PlacedChain, delta_matrix, p_func, p_matrix
from .interp_km import beta, beta_matrix
from .operators import OperatorTable, fixed_point, verify_interpolation
from .pairspace import CompatiblePair, InterpParams, MetricMatrix, validate_instance, validate_metric
from .seqnorm import CertifiedValue, gamma, m_gamma, m_holder

__all__ = [
    "CertifiedValue",
    "CompatiblePair",
    "InterpParams",
    "MetricMatrix",
    "OperatorTable",
    "PlacedChain",
    "beta",
    "beta_matrix",
    "delta_matrix",
    "fixed_point",
    "gamma",
    "h_cost",
    "jm",
    "jm_matrix",
    "km",
    "km_matrix",
    "km_profile",
    "m_gamma",
    "m_holder",
    "p_func",
    "p_matrix",
    "validate_instance",
    "validate_metric",
    "verify_interpolation",
]
