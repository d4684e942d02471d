"""curvekit: Short Weierstrass curve generation, safety validation and
toy-scale discrete-logarithm attacks over prime fields."""

from .attacks import (
    AttackResult,
    DlpInstance,
    bsgs,
    exhaustive_search,
    pohlig_hellman,
    pollard_lambda,
    pollard_rho,
)
from .cm import CMParams, CmResult, class_number, class_polynomial, cm_generate, find_discriminant
from .counting import count_bsgs, count_exhaustive, curve_order, hasse_interval, trace_of
from .curve import INFINITY, CurveParams, CurvePoint, OrderInfo, new_curve, point_order
from .numtheory import (
    Crandall,
    GeneratedPrime,
    Mersenne,
    MontgomeryFriendly,
    RandomPrime,
    cornacchia,
    embedding_degree,
    gen_prime,
    is_prime,
    legendre,
    sqrt_mod,
    squarefree_part,
)
from .randgen import CurveSuite, SeedTrace, generate, replay
from .registry import audit, builtin_registry, load_registry, trend_report
from .validator import (
    Subject,
    ValidationReport,
    ValidatorPolicy,
    Verdict,
    run_criterion,
    validate,
)

__version__ = "0.1.0"
