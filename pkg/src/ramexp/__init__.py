"""Finite Ramanujan expansions, correlations of arithmetic functions and
their shift expansions."""
from .core_arith import (
    SieveTables,
    build_tables,
    divisor_count,
    primorial,
    ramanujan_sum,
    ramanujan_sum_holder,
    ramanujan_sums,
    shared_tables,
)
from .correlation import (
    CorrelationTable,
    SingularSum,
    correlate_direct,
    correlate_via_divisors,
    correlation_table,
    heuristic_residual,
    singular_sum_coefficient_form,
    singular_sum_eratosthenes_form,
    truncated_vs_ideal_singular,
    twin_singular_series_partial,
)
from .errors import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidArgumentError,
    NotFoundError,
    PreconditionError,
    RamexpError,
    ResourceLimitError,
    VerificationError,
)
from .expansion import (
    ArithmeticFunction,
    RamanujanCoefficients,
    TruncatedDivisorSum,
    builtin_catalog,
    classical_coefficient_sigma,
    eratosthenes_transform,
    evaluate_truncated,
    finite_ramanujan_coefficients,
    invert_coefficients,
    load_custom,
    lookup,
    reconstruct,
)
from .shift_expansion import (
    OrthogonalityReport,
    ShiftExpansion,
    carmichael_coefficient,
    decay_class_fit,
    explicit_coefficient,
    orthogonality_check,
    reconstruct_correlation,
)
from .sieve import (
    GSiftedFunction,
    SieveFunction,
    ap_main_term_identity,
    ap_sum,
    coprime_correlation,
    coprime_sum,
    dyadic_csum_bound_check,
    fre_correlation_formula,
    make_gsifted,
    twisted_sum,
)
from .symmetry import (
    BlockFunction,
    SgnWeight,
    irregularity_experiment,
    sgn_weight,
    symmetry_integral,
    symmetry_via_correlations,
)

__version__ = "0.1.0"
