"""Random-approach curve generation with an early-abort check chain.

A candidate (a, b) must survive, in order: non-singularity, non-square b,
prime order, non-supersingularity, non-anomality, base point order, the
subgroup-uniqueness and subgroup-size thresholds, the embedding-degree
bound, and the twist battery (twist non-singular, twist order prime and
non-supersingular).  Counting runs after the free algebraic checks since
it dominates the cost.  Every emitted suite is re-checked against the
full validator, and every random draw is recorded so a third party can
replay the derivation bit for bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .counting import Ambiguous, curve_order, trace_of
from .curve import CurveParams, CurvePoint, OrderInfo, Singular
from .numtheory import RandomPrime, embedding_degree, gen_prime, is_prime, legendre
from .validator import Subject, ValidatorPolicy, Verdict, validate

__all__ = [
    "RetryBudgetExhausted",
    "ReplayMismatch",
    "TraceRng",
    "ReplayRng",
    "SeedTrace",
    "GenerationStats",
    "CurveSuite",
    "CHECK_ORDER",
    "generate",
    "replay",
]

CHECK_ORDER = (
    "non_singular",
    "b_not_square",
    "order_ambiguous",
    "order_prime",
    "non_supersingular",
    "non_anomalous",
    "base_point_order",
    "subgroup_unique",
    "subgroup_size",
    "embedding_degree",
    "twist_non_singular",
    "twist_order_prime",
    "twist_non_supersingular",
    "validator",
)


class RetryBudgetExhausted(RuntimeError):
    """Candidate budget ran out; carries the per-check abort statistics."""

    def __init__(self, message: str, stats: "GenerationStats"):
        super().__init__(message)
        self.stats = stats


class ReplayMismatch(RuntimeError):
    """A recorded trace disagrees with the draws the algorithm requested."""


class TraceRng:
    """Randomness source that records every draw it hands out."""

    def __init__(self, rng):
        self._rng = rng
        self.draws: List[Tuple[int, int, int]] = []

    def randrange(self, start: int, stop: Optional[int] = None) -> int:
        if stop is None:
            start, stop = 0, start
        value = self._rng.randrange(start, stop)
        self.draws.append((start, stop, value))
        return value


class ReplayRng:
    """Feeds back a recorded draw sequence, verifying each request."""

    def __init__(self, draws: Sequence[Tuple[int, int, int]]):
        self._draws = list(draws)
        self._index = 0

    def randrange(self, start: int, stop: Optional[int] = None) -> int:
        if stop is None:
            start, stop = 0, start
        if self._index >= len(self._draws):
            raise ReplayMismatch("trace exhausted before generation finished")
        rec_start, rec_stop, value = self._draws[self._index]
        self._index += 1
        if (rec_start, rec_stop) != (start, stop):
            raise ReplayMismatch(
                f"draw {self._index}: recorded range [{rec_start}, {rec_stop}) "
                f"but the algorithm asked for [{start}, {stop})"
            )
        return value

    @property
    def exhausted(self) -> bool:
        return self._index == len(self._draws)


@dataclass(frozen=True)
class SeedTrace:
    """Master seed (when known) plus the full draw transcript."""

    seed: Optional[int]
    draws: Tuple[Tuple[int, int, int], ...]


@dataclass
class GenerationStats:
    attempts: int = 0
    aborts: Dict[str, int] = field(default_factory=dict)

    def record(self, check: str) -> None:
        self.aborts[check] = self.aborts.get(check, 0) + 1


@dataclass(frozen=True)
class CurveSuite:
    """Everything Algorithm-style random generation emits."""

    curve: CurveParams
    order: OrderInfo
    base_point: CurvePoint
    twist_order: int
    seed_trace: SeedTrace
    policy: ValidatorPolicy
    stats: GenerationStats

    def subject(self) -> Subject:
        return Subject(self.curve, self.order, self.base_point)


def _smallest_nonsquare(p: int) -> int:
    c = 2
    while legendre(c, p) != -1:
        c += 1
    return c


def generate(
    bits: int,
    policy: Optional[ValidatorPolicy] = None,
    rng=None,
    seed: Optional[int] = None,
    retry_budget: int = 50_000,
) -> CurveSuite:
    """Generate a curve suite of the requested prime size.

    The prime is drawn once; coefficient pairs are retried until the whole
    chain passes or the budget runs out.  Pass `seed` (or a prepared rng)
    to make the run reproducible; the suite's seed_trace replays either way.
    """
    if bits < 8:
        raise ValueError("bits must be >= 8")
    if policy is None:
        policy = ValidatorPolicy.desk_scale(bits)
    if rng is None:
        if seed is None:
            seed = random.SystemRandom().randrange(1 << 63)
        rng = random.Random(seed)
    trng = TraceRng(rng)
    stats = GenerationStats()

    p = gen_prime(RandomPrime(bits), trng).value
    threshold = 1 << policy.L

    while stats.attempts < retry_budget:
        stats.attempts += 1
        a = trng.randrange(p)
        b = trng.randrange(p)
        if (4 * pow(a, 3, p) + 27 * b * b) % p == 0:
            stats.record("non_singular")
            continue
        if legendre(b, p) != -1:
            stats.record("b_not_square")
            continue
        E = CurveParams(p, a, b)

        try:
            N = curve_order(E, trng)
        except Ambiguous:
            stats.record("order_ambiguous")
            continue
        if not is_prime(N):
            stats.record("order_prime")
            continue
        t = trace_of(E, N)
        if t == 0 or t % p == 0:
            stats.record("non_supersingular")
            continue
        if N == p:
            stats.record("non_anomalous")
            continue

        G = E.random_point(trng)
        if not E.scalar_mul(N, G).infinity:
            # The counted order is verified unique, so this cannot happen
            # unless the group law itself is broken.
            raise RuntimeError("computed order does not annihilate a point")
        n, h = N, 1
        if n * n <= 16 * p:
            stats.record("subgroup_unique")
            continue
        if n <= threshold:
            stats.record("subgroup_size")
            continue
        if embedding_degree(n, p, policy.embedding_bound) is not None:
            stats.record("embedding_degree")
            continue

        try:
            twist = E.twist(_smallest_nonsquare(p))
        except Singular:
            # Impossible for a non-singular E; kept to mirror the chain.
            stats.record("twist_non_singular")
            continue
        twist_order = 2 * p + 2 - N
        if not is_prime(twist_order):
            stats.record("twist_order_prime")
            continue
        if curve_order(twist, trng) != twist_order:
            raise RuntimeError("twist order identity 2p + 2 - N failed")
        twist_trace = p + 1 - twist_order
        if twist_trace == 0 or twist_trace % p == 0:
            stats.record("twist_non_supersingular")
            continue

        order = OrderInfo(N=N, t=t, n=n, h=h)
        subject = Subject(E, order, G)
        report = validate(subject, policy)
        if (
            report.failures
            or report.indeterminates
            or report.advisory_failures
        ):
            stats.record("validator")
            continue

        return CurveSuite(
            curve=E,
            order=order,
            base_point=G,
            twist_order=twist_order,
            seed_trace=SeedTrace(seed, tuple(trng.draws)),
            policy=policy,
            stats=stats,
        )

    raise RetryBudgetExhausted(
        f"no acceptable curve within {retry_budget} candidates over F_{p}", stats
    )


def replay(
    trace: SeedTrace,
    bits: int,
    policy: Optional[ValidatorPolicy] = None,
    retry_budget: int = 50_000,
) -> CurveSuite:
    """Re-derive a suite from its recorded draw transcript.

    Raises ReplayMismatch when the transcript does not drive the algorithm
    to completion exactly.
    """
    source = ReplayRng(trace.draws)
    suite = generate(bits, policy, rng=source, seed=trace.seed, retry_budget=retry_budget)
    if not source.exhausted:
        raise ReplayMismatch("trace has draws left over after generation")
    return suite
