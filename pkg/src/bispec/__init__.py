"""bispec: exact symbolic computation with differential operators over Q
and the classification of prime-order bispectral operators.

The public surface re-exports the main types and operations of each layer:
exact rational arithmetic, the operator ring, the operator families and
Darboux engine, the bounded-coefficient wave machinery, the Airy-adic
calculus, the filtration toolkit, and the parser/classifier front end.
"""

from .errors import (
    AdBudgetExceeded,
    BadIndex,
    BispecError,
    DivisionByZeroOperator,
    FormViolation,
    FormViolationWarning,
    InsufficientPrecision,
    InvariantViolation,
    LogObstruction,
    NegativeDerivativeExponent,
    NonRationalGauge,
    NormalizationFailed,
    NotAFactor,
    NotAiryShape,
    NotCommuting,
    NotHomogeneous,
    NotInDomain,
    NotIncreasing,
    NotMonic,
    NotRankOrderCase,
    OperatorSyntaxError,
    PoleAtOrigin,
    ReconstructionFailed,
    TruncationTooShort,
    UnboundedCoefficient,
    VariableMismatch,
    ZeroDenominator,
    ZeroOperand,
)
from .rational import (
    LaurentTail,
    Poly,
    PowerSeries,
    RatFunc,
    Scalar,
    antiderivative,
    laurent_expand,
    rat_antiderivative,
    ratfunc_canonicalize,
    rational_reconstruct,
    taylor_expand_at_zero,
)
from .diffop import (
    DiffOp,
    ad_condition_min_m,
    ad_pow,
    apply_to_series,
    commutator,
    dop_mul,
    euler_operator,
    gauge_normalize,
    left_divide,
    right_divide,
)
from .families import (
    BesselSpec,
    DarbouxResult,
    bessel_integrality,
    bessel_recover,
    bessel_symbol,
    compose_darboux,
    darboux,
    is_euler_homogeneous,
    make_airy,
    make_bessel,
    make_constcoeff,
    p_form_check,
)
from .weights import (
    BiHomPoly,
    NewtonPolygon,
    NormalFormReport,
    WeightPair,
    associated_polynomial,
    choose_weights,
    exponent_set,
    homogeneous_part,
    normal_form_test,
    principal_part,
    weighted_order,
)
from .bounded import (
    BoundedTestReport,
    CentralizerResult,
    DualOperator,
    PDO,
    ThetaConjugate,
    WaveData,
    bounded_test,
    build_lambda,
    centralizer_search,
    conjugate_theta,
    involution_b,
    q_polynomial_in_L,
    split_constant_part,
    wave_defect,
    wave_operator,
)
from .airy import (
    AiryPDO,
    MJOp,
    ObstructionStep,
    ObstructionTrace,
    airy_bispectral_check,
    airy_involution,
    airy_kernel_series,
    airy_shape,
    airy_wave_residual,
    airy_wave_solve,
    bracket_decompose,
    height,
    perturbation_obstruction,
    reduce_mod_A,
    v_decompose,
)
from .parser import parse_operator, print_operator
from .classify import Budgets, ClassificationReport, classify

__version__ = "0.1.0"
