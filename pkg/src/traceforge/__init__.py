"""Exact invariant-theoretic computations for two generic traceless 4x4
matrices: the generator catalog of the pure trace algebra, weight
multiplicities, highest weight bases, and the defining relations in
degrees 12 through 14 with certificates.
"""

from .cache import CacheStore
from .genmat import (
    EvalCache,
    build_x,
    build_y,
    eval_trace_expr,
    eval_word_trace,
    literal_word_trace,
)
from .glcat import (
    ABS_GENS,
    AbsGen,
    AbsPoly,
    Partition,
    abs_delta,
    abs_delta1,
    abs_monomials,
    catalog,
    hilbert_coeff,
    multiplicity,
    phi,
)
from .hwv import HwvBasis, hwv_basis, hwv_verify, span_equal
from .phiparse import PhiParseError, format_phi, parse_phi
from .polyring import CommPoly, poly_from_text, poly_to_text
from .relfinder import (
    LAMBDAS_BY_DEGREE,
    PARAMETER_SPLIT,
    RelationSpace,
    leading_analysis,
    membership,
    new_relations,
    orbit,
    relation_space,
    verify_zero,
    verify_zero_abs,
)
from .tracelang import (
    TraceExpr,
    TraceParseError,
    delta,
    delta1,
    format_trace_expr,
    parse_trace,
    trace_of,
)

__version__ = "0.1.0"

__all__ = [
    "ABS_GENS",
    "AbsGen",
    "AbsPoly",
    "CacheStore",
    "CommPoly",
    "EvalCache",
    "HwvBasis",
    "LAMBDAS_BY_DEGREE",
    "PARAMETER_SPLIT",
    "Partition",
    "PhiParseError",
    "RelationSpace",
    "TraceExpr",
    "TraceParseError",
    "abs_delta",
    "abs_delta1",
    "abs_monomials",
    "build_x",
    "build_y",
    "catalog",
    "delta",
    "delta1",
    "eval_trace_expr",
    "eval_word_trace",
    "format_phi",
    "format_trace_expr",
    "hilbert_coeff",
    "hwv_basis",
    "hwv_verify",
    "leading_analysis",
    "literal_word_trace",
    "membership",
    "multiplicity",
    "new_relations",
    "orbit",
    "parse_phi",
    "parse_trace",
    "phi",
    "poly_from_text",
    "poly_to_text",
    "relation_space",
    "span_equal",
    "trace_of",
    "verify_zero",
    "verify_zero_abs",
    "__version__",
]
