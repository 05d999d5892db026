"""Truncated multilinear function series and the operator-valued S-transform."""

from .algebra import AlgebraContext, AlgebraElement, approx_eq_elem, elem_inverse, elem_mul
from .errors import (
    ConsistencyFailure,
    ContextMismatch,
    DegreeOutOfRange,
    LinearTermSingular,
    MFSError,
    NonzeroConstantTerm,
    NotInvertible,
    NotLeftMultipleOfI,
    OrderMismatch,
    SizeLimitExceeded,
)
from .expr import series_expr
from .freeprob import (
    VariableSpec,
    chi,
    cumulants_from_moments,
    moments_from_cumulants,
    random_cumulants,
    s_from_cumulants,
    s_transform,
    t_transform,
)
from .freeprod import ProductTriple, VerificationReport, product_moment_triple, twisted_rhs, verify_twisted
from .mfs import (
    MultilinearMap,
    MultiSeries,
    add,
    approx_eq_series,
    comp_inverse,
    compose,
    constant_series,
    evaluate,
    identity_series,
    left_strip,
    mul,
    mul_inverse,
    random_series,
    scale,
    zero_series,
)

__version__ = "0.1.0"
