"""Minimal-index and matrix-dimension calculus for inclusions with
finite-dimensional centers."""

from .core import (
    Block,
    ConnectedDecomposition,
    DimensionMatrix,
    EntryBelowOne,
    NoConvergence,
    NonFinite,
    NotConnected,
    ShapeMismatch,
    SupportPattern,
    ValidationError,
    ZeroColumn,
    ZeroRow,
    decompose_connected,
    is_connected,
    norm_diagnostics,
    validate_dimension_matrix,
)
from .spectral import (
    CanonicalStates,
    ExpectationMatrix,
    IndexClassification,
    PFData,
    canonical_states,
    classify_index,
    minimal_expectation,
    minimal_index,
    operator_norm,
    pf_data,
    standard_solution_weights,
    weighted_additivity_check,
)
from .multimatrix import (
    BetaAlphaViolation,
    BratteliDiagram,
    DimensionMismatch,
    MarkovTraceData,
    NonIntegerEntry,
    extremality_report,
    markov_trace,
    realize_integer_index,
    restriction_residual,
    super_extremality,
    to_dot,
    validate_bratteli,
)
from .calculus import (
    CompositionReport,
    Tower,
    additivity_check,
    compose,
    compose_expectations,
    factor_case_additivity,
    jones_tower,
    sufficient_condition,
)
from .oracle import (
    NotStochastic,
    OracleConfig,
    OracleResult,
    SupportMismatch,
    cross_validate,
    index_of_expectation,
    minimize_index,
)

__version__ = "0.1.0"
