"""Exact off-diagonal Bergman kernel expansion coefficients from a Kähler potential jet."""

from .errors import *  # noqa: F401,F403
from .expansion import (
    ExpansionResult,
    alpha_series,
    b_closed_form,
    b_from_beta,
    beta_coefficient,
    compute_expansion,
    homogeneity_check,
    pn_expansion,
    sharp,
)
from .normal_form import NormalizationRecord, apply_record, normalize_to_K, verify_K_form
from .numbers import GaussianRational
from .polynomials import QuadIndex, ScaledPolynomial
from .series import (
    BidegreeIndex,
    PotentialJet,
    TruncatedSeries,
    compose_holomorphic,
    compositional_inverse,
    make_jet,
    partial_derivative,
    scale_jet,
    series_exp,
    series_log1p,
    series_mul,
)
from .tensors import (
    CurvatureData,
    TensorSeries,
    christoffel,
    covariant_derivative,
    curvature_data_at_point,
    curvature_series,
    inverse_metric,
    metric_from_potential,
)

__version__ = "0.1.0"
