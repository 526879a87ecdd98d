"""Numerics for the commutative subalgebra C*(1, B_0) of the quantum projective line."""

__version__ = "0.1.0"

from qpl._kernels import BACKEND
from qpl.errors import DomainError, ParseError, QPLError
from qpl.gauge import (
    SIGN_CONVENTION,
    ConnectionForm,
    DefectSet,
    GaugeClass,
    GaugeResult,
    defective_spots,
    exp_series_g,
    gauge_residual,
    is_standard_class,
    solve_gauge_between,
    solve_gauge_to_standard,
)
from qpl.oprep import (
    TruncatedOperator,
    boundary_defect,
    independence_rank,
    relation_residuals,
    rep_function,
    rep_generators,
    section_residual_matrix,
)
from qpl.qcore import CertifiedValue, QParam, certified_product, q_geom_sum, validate_q
from qpl.sections import (
    HolomorphicSection,
    KernelReport,
    kernel_dim_lower_bound,
    kernel_sections,
    section_for,
    section_residual,
)
from qpl.specfun import (
    LIMIT,
    Polynomial,
    Sampled,
    SpectralFunction,
    combine,
    delta_bar,
    dilate,
    evaluate,
    i_bar,
    is_invertible,
    poly_fn,
    sampled_fn,
    sup_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
