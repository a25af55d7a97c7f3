"""Change of ordering for zero-dimensional ideals over discretely valued fields."""
from .errors import (
    BoundTooSmall,
    DivisionByZero,
    InternalDegreeOverflow,
    NotReduced,
    NotSemiStable,
    NotShapePosition,
    NotUnimodular,
    NotZeroDimensional,
    PrecisionExhausted,
    SamplingFailed,
    TropFGLMError,
    UnknownValuation,
    ZeroPolynomial,
)
from .fglm import change_ordering, fglm_classical, fglm_shape_position, fglm_tropical
from .gb_oracle import macaulay_gb, macaulay_normal_form, random_system, verify_reduced_gb
from .polyring import Polynomial, Term, TermOrder, compare_terms, leading_term, staircase
from .quotient import (
    GroebnerBasis,
    QuotientData,
    apply_change_of_variables,
    is_borel_fixed,
    is_semi_stable,
    multiplication_matrices,
    multiplication_matrix_semistable,
    nf_variables,
    random_unimodular,
)
from .trop_linalg import MacaulayMatrix, PrecisionReport, column_reduce_fglm, smith_valuations, tropical_row_echelon
from .valued_field import FieldConfig, RationalField, agrees_with, arith, from_rational, sample_integer, valuation

__version__ = "0.1.0"
