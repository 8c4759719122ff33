"""Desk-scale laboratory for inner functions and finite model operators."""

from .calculus import (
    CalculusConfig,
    ContractivityReport,
    apply,
    apply_spectral,
    check_contractivity,
    check_multiplicativity,
    multiply_functions,
    operator_norm,
)
from .errors import (
    AccuracyError,
    ConditioningError,
    DegenerateModelError,
    EvaluationDomainError,
    IllConditionedSpectrumError,
    ImpossibleByTheoryError,
    InvalidZeroError,
    ModelSpaceError,
    NearBoundarySpectrumError,
    NotADivisorError,
    NotInvariantError,
    RankAmbiguityError,
    SerializationError,
    TrivialAnnihilatorError,
    TrivialElementError,
    UnsupportedModelError,
)
from .extraction import (
    ExtractionCertificate,
    Subspace,
    cyclic_subspace,
    divisor_kernel_subspace,
    extract_invariant_subspace,
    invariance_residual,
    is_multiplicity_free,
    minimal_function,
    minimal_function_of_vector,
    restrict,
    verify_algebraic,
)
from .hardy import (
    CircleSampler,
    circle_nodes,
    fourier_coefficients,
    h2_inner_product,
    reproducing_kernel,
)
from .inner import (
    AtomicSingularMeasure,
    BlaschkeFunction,
    ConvergenceReport,
    InnerFunction,
    Polynomial,
    ProductFunction,
    RationalFunction,
    blaschke_convergence_check,
    blaschke_factor,
    blaschke_product,
    divides,
    enumerate_blaschke_divisors,
    equiv,
    eval_blaschke_factor,
    eval_inner,
    exact_divide,
    gcd,
    inner_one,
    is_negligible,
    lcm,
    multiply,
    sample_singular_divisors,
    singular_inner,
)
from .model import (
    ModelOperator,
    ModelSpaceBasis,
    build_model_operator,
    oracle_compressed_shift,
)
from .serialize import (
    canonical_dumps,
    certificate_from_json,
    certificate_to_json,
    complex_from_json,
    complex_to_json,
    frame_from_json,
    frame_to_json,
    inner_from_json,
    inner_to_json,
    matrix_from_json,
    matrix_to_json,
    model_from_json,
    model_to_json,
    parse_json,
    vector_from_json,
    vector_to_json,
)

__version__ = "0.1.0"
