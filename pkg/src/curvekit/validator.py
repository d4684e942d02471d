"""Safety-criteria engine: evaluates a curve + order + base point against
the full countermeasure catalog and produces an evidence-bearing report.

Verdicts are three-valued.  Criteria that need factorizations beyond the
effort budget report Indeterminate instead of silently passing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

from .curve import CurveParams, CurvePoint, OrderInfo
from .numtheory import (
    embedding_degree,
    is_prime,
    legendre,
    squarefree_part,
    trial_division,
)

__all__ = [
    "InconsistentSubject",
    "Verdict",
    "ValidatorPolicy",
    "Subject",
    "CriterionResult",
    "ValidationReport",
    "CRITERIA",
    "run_criterion",
    "validate",
]


class InconsistentSubject(RuntimeError):
    """The claimed orders and base point contradict each other."""


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ValidatorPolicy:
    """Thresholds for the criteria catalog.

    Cryptographic defaults: subgroup size 2^160, embedding bound 100,
    cofactor at most 4.  The discriminant threshold defaults to 1, i.e.
    informational, because several standard curves deliberately use tiny
    CM discriminants; raise it to demand a generic curve.
    """

    L: int = 160
    embedding_bound: int = 100
    cofactor_max: int = 4
    discriminant_effort: int = 10**6
    discriminant_min: int = 1
    require_prime_order: bool = False
    require_b_nonsquare: bool = False

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.embedding_bound < 1:
            raise ValueError("embedding bound must be >= 1")
        if self.cofactor_max < 1:
            raise ValueError("cofactor bound must be >= 1")
        if self.discriminant_effort < 2:
            raise ValueError("discriminant effort must be >= 2")
        if self.discriminant_min < 1:
            raise ValueError("discriminant threshold must be >= 1")

    @classmethod
    def desk_scale(cls, bits: int) -> "ValidatorPolicy":
        """Thresholds scaled down to countable curve sizes."""
        return cls(
            L=max(1, bits - 2),
            discriminant_min=max(1, 1 << max(1, bits // 4)),
        )

    def to_dict(self) -> Dict[str, int]:
        return {
            "L": self.L,
            "embedding_bound": self.embedding_bound,
            "cofactor_max": self.cofactor_max,
            "discriminant_effort": self.discriminant_effort,
            "discriminant_min": self.discriminant_min,
            "require_prime_order": self.require_prime_order,
            "require_b_nonsquare": self.require_b_nonsquare,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ValidatorPolicy":
        return replace(cls(), **data)


@dataclass(frozen=True)
class Subject:
    """What gets validated: a curve, its order data and a base point."""

    curve: CurveParams
    order: OrderInfo
    base_point: CurvePoint


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    verdict: Verdict
    advisory: bool
    evidence: Dict


@dataclass(frozen=True)
class ValidationReport:
    results: Tuple[CriterionResult, ...]

    def result(self, criterion: str) -> CriterionResult:
        for item in self.results:
            if item.criterion == criterion:
                return item
        raise KeyError(criterion)

    @property
    def failures(self) -> Tuple[str, ...]:
        return tuple(
            r.criterion
            for r in self.results
            if r.verdict is Verdict.FAIL and not r.advisory
        )

    @property
    def indeterminates(self) -> Tuple[str, ...]:
        return tuple(
            r.criterion
            for r in self.results
            if r.verdict is Verdict.INDETERMINATE and not r.advisory
        )

    @property
    def advisory_failures(self) -> Tuple[str, ...]:
        return tuple(
            r.criterion
            for r in self.results
            if r.verdict is Verdict.FAIL and r.advisory
        )

    @property
    def overall_pass(self) -> bool:
        """Pass means no failure and no indeterminate among required criteria."""
        return not self.failures and not self.indeterminates


def check_consistency(subject: Subject) -> None:
    """N*G and n*G must be the identity and G must sit on the curve."""
    E, order, G = subject.curve, subject.order, subject.base_point
    if G.infinity:
        raise InconsistentSubject("base point is the identity")
    if not E.contains(G):
        raise InconsistentSubject("base point is not on the curve")
    if not E.scalar_mul(order.N, G).infinity:
        raise InconsistentSubject("N * G is not the identity")
    if not E.scalar_mul(order.n, G).infinity:
        raise InconsistentSubject("n * G is not the identity")


# ---------------------------------------------------------------------------
# criterion implementations


def _c1_subgroup_size(s: Subject, policy: ValidatorPolicy):
    n = s.order.n
    ok = n > (1 << policy.L)
    return ok, {"n_bits": n.bit_length(), "required_bits": policy.L + 1}


def _c2_non_anomalous(s: Subject, policy: ValidatorPolicy):
    return s.order.N != s.curve.p, {"N_equals_p": s.order.N == s.curve.p}


def _c3_unique_subgroup(s: Subject, policy: ValidatorPolicy):
    n, p = s.order.n, s.curve.p
    return n * n > 16 * p, {"n": n, "four_sqrt_p": 4 * math.isqrt(p)}


def _order_prime(s: Subject, policy: ValidatorPolicy):
    N, n, h = s.order.N, s.order.n, s.order.h
    if is_prime(N):
        return True, {"N_is_prime": True, "h": h}
    if policy.require_prime_order:
        return False, {"N_is_prime": False, "h": h}
    near = h <= policy.cofactor_max and is_prime(n)
    return near, {"N_is_prime": False, "h": h, "n_is_prime": is_prime(n)}


def _basepoint_order_prime(s: Subject, policy: ValidatorPolicy):
    return is_prime(s.order.n), {"n_bits": s.order.n.bit_length()}


def _non_supersingular(s: Subject, policy: ValidatorPolicy):
    t, p = s.order.t, s.curve.p
    return t != 0 and t % p != 0, {"t": t}


def _embedding_degree(s: Subject, policy: ValidatorPolicy):
    n, p = s.order.n, s.curve.p
    if math.gcd(n, p) != 1:
        # n | p^k - 1 is impossible when n shares a factor with p.
        return True, {"note": "n shares a factor with p; no embedding exists"}
    k = embedding_degree(n, p, policy.embedding_bound)
    if k is None:
        return True, {"bound": policy.embedding_bound}
    return False, {"k": k, "bound": policy.embedding_bound}


def _cofactor(s: Subject, policy: ValidatorPolicy):
    return s.order.h <= policy.cofactor_max, {
        "h": s.order.h,
        "max": policy.cofactor_max,
    }


def _b_not_square(s: Subject, policy: ValidatorPolicy):
    symbol = legendre(s.curve.b, s.curve.p)
    return symbol == -1, {"legendre_b": symbol}


def _twist_secure(s: Subject, policy: ValidatorPolicy):
    """Quadratic twist order must resist the same subgroup attacks.

    Pass when the twist order is prime, near-prime under the cofactor
    bound, or carries a known prime factor above 2^L.  When bounded
    factoring cannot settle any branch the verdict is Indeterminate.
    """
    p, N = s.curve.p, s.order.N
    twist_order = 2 * p + 2 - N
    if twist_order <= 1:
        return Verdict.FAIL, {"twist_order": twist_order}
    if is_prime(twist_order):
        return Verdict.PASS, {"twist_order_prime": True}
    factors, cofactor, _ = trial_division(twist_order, policy.discriminant_effort)
    known = sorted(factors)
    if cofactor == 1 or is_prime(cofactor):
        if cofactor > 1:
            known.append(cofactor)
        largest = max(known)
        small_part = twist_order // largest
        evidence = {
            "twist_order_prime": False,
            "largest_prime_bits": largest.bit_length(),
            "cofactor": small_part,
        }
        if small_part <= policy.cofactor_max:
            return Verdict.PASS, evidence
        if largest > (1 << policy.L):
            return Verdict.PASS, evidence
        return Verdict.FAIL, evidence
    if known and max(known) > (1 << policy.L):
        return Verdict.PASS, {
            "twist_order_prime": False,
            "largest_prime_bits": max(known).bit_length(),
        }
    return Verdict.INDETERMINATE, {
        "twist_order_prime": False,
        "unfactored_bits": cofactor.bit_length(),
    }


def _cm_discriminant(s: Subject, policy: ValidatorPolicy):
    """Squarefree part of t^2 - 4p must exceed the policy threshold.

    The true squarefree part divides the bounded-effort value, so a small
    partial result already proves failure; a large incomplete one proves
    nothing and yields Indeterminate.
    """
    t, p = s.order.t, s.curve.p
    result = squarefree_part(t * t - 4 * p, policy.discriminant_effort)
    magnitude = abs(result.d)
    evidence = {
        "squarefree_part_bits": magnitude.bit_length(),
        "complete": result.complete,
        "threshold": policy.discriminant_min,
    }
    if magnitude < 1 << 64:
        evidence["squarefree_part"] = result.d
    if result.complete:
        verdict = Verdict.PASS if magnitude > policy.discriminant_min else Verdict.FAIL
    elif magnitude <= policy.discriminant_min:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.INDETERMINATE
    return verdict, evidence


def _hasse_consistent(s: Subject, policy: ValidatorPolicy):
    t, p = s.order.t, s.curve.p
    return t * t <= 4 * p, {"t": t, "two_sqrt_p": math.isqrt(4 * p)}


_CATALOG: Tuple[Tuple[str, Callable], ...] = (
    ("C1_SUBGROUP_SIZE", _c1_subgroup_size),
    ("C2_NON_ANOMALOUS", _c2_non_anomalous),
    ("C3_UNIQUE_SUBGROUP", _c3_unique_subgroup),
    ("ORDER_PRIME", _order_prime),
    ("BASEPOINT_ORDER_PRIME", _basepoint_order_prime),
    ("NON_SUPERSINGULAR", _non_supersingular),
    ("EMBEDDING_DEGREE", _embedding_degree),
    ("COFACTOR", _cofactor),
    ("B_NOT_SQUARE", _b_not_square),
    ("TWIST_SECURE", _twist_secure),
    ("CM_DISCRIMINANT", _cm_discriminant),
    ("HASSE_CONSISTENT", _hasse_consistent),
)

CRITERIA: Tuple[str, ...] = tuple(name for name, _ in _CATALOG)

_FUNCTIONS: Dict[str, Callable] = dict(_CATALOG)


def _evaluate(criterion: str, subject: Subject, policy: ValidatorPolicy):
    outcome, evidence = _FUNCTIONS[criterion](subject, policy)
    if isinstance(outcome, Verdict):
        verdict = outcome
    else:
        verdict = Verdict.PASS if outcome else Verdict.FAIL
    advisory = criterion == "B_NOT_SQUARE" and not policy.require_b_nonsquare
    return CriterionResult(criterion, verdict, advisory, evidence)


def run_criterion(
    criterion: str, subject: Subject, policy: Optional[ValidatorPolicy] = None
) -> CriterionResult:
    """Evaluate one catalog criterion against a consistent subject."""
    if criterion not in _FUNCTIONS:
        raise KeyError(f"unknown criterion {criterion!r}")
    policy = policy or ValidatorPolicy()
    check_consistency(subject)
    return _evaluate(criterion, subject, policy)


def validate(
    subject: Subject,
    policy: Optional[ValidatorPolicy] = None,
    threads: int = 1,
) -> ValidationReport:
    """Run the whole catalog; the report lists criteria in catalog order
    regardless of evaluation order."""
    policy = policy or ValidatorPolicy()
    check_consistency(subject)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = tuple(
                pool.map(lambda name: _evaluate(name, subject, policy), CRITERIA)
            )
    else:
        results = tuple(_evaluate(name, subject, policy) for name in CRITERIA)
    return ValidationReport(results)
