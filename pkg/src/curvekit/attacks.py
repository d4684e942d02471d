"""Toy-scale discrete logarithm solvers with operation counting.

Four solvers: exhaustive multiples, baby-step giant-step, a parallel
additive-walk rho with distinguished points, and the tame/wild kangaroo
method for interval-restricted keys, plus prime-by-prime digit extraction
with CRT recombination for smooth orders.  group_ops counts the group
additions spent searching; the final verification multiply is free.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .curve import CurveParams, CurvePoint, INFINITY, RawPoint, _raw_add, _raw_mul, _raw_neg, _to_raw
from .numtheory import crt, factorize, is_prime

__all__ = [
    "CapExceeded",
    "OutOfSubgroup",
    "DegenerateCollision",
    "NotInInterval",
    "BadFactorization",
    "DlpInstance",
    "AttackResult",
    "exhaustive_search",
    "bsgs",
    "pollard_rho",
    "pollard_lambda",
    "pohlig_hellman",
]


class CapExceeded(RuntimeError):
    """The solver hit its iteration cap before finding the logarithm."""


class OutOfSubgroup(RuntimeError):
    """The target is not a multiple of the base point."""


class DegenerateCollision(RuntimeError):
    """Colliding walks produced a non-invertible exponent relation."""


class NotInInterval(RuntimeError):
    """The kangaroo budget ran out: the promised interval was wrong."""


class BadFactorization(RuntimeError):
    """The supplied factorization does not multiply back to n."""


@dataclass(frozen=True)
class DlpInstance:
    """Challenge: recover l with target = l * base, 0 <= l < n."""

    curve: CurveParams
    base_point: CurvePoint
    n: int
    target: CurvePoint

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.base_point.infinity:
            raise ValueError("base point must be affine")
        if not self.curve.contains(self.base_point):
            raise ValueError("base point is not on the curve")
        if not self.curve.contains(self.target):
            raise ValueError("target is not on the curve")
        if not self.curve.scalar_mul(self.n, self.base_point).infinity:
            raise ValueError("n does not annihilate the base point")


@dataclass(frozen=True)
class AttackResult:
    l: int
    group_ops: int
    wall_time: float
    method: str


class _Ops:
    """Cheap group-operation counter threaded through the raw helpers."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def add(self, P: RawPoint, Q: RawPoint, a: int, p: int) -> RawPoint:
        self.count += 1
        return _raw_add(P, Q, a, p)

    def mul(self, k: int, P: RawPoint, a: int, p: int) -> RawPoint:
        acc: RawPoint = None
        addend = P
        while k:
            if k & 1:
                acc = self.add(acc, addend, a, p)
            k >>= 1
            if k:
                addend = self.add(addend, addend, a, p)
        return acc


def _verify(inst: DlpInstance, l: int) -> None:
    if inst.curve.scalar_mul(l, inst.base_point) != inst.target:
        raise OutOfSubgroup("solver produced a scalar that does not map to the target")


def exhaustive_search(inst: DlpInstance, cap: Optional[int] = None) -> AttackResult:
    """Successive multiples of the base point until the target appears."""
    start = time.perf_counter()
    cap = inst.n - 1 if cap is None else cap
    a, p = inst.curve.a, inst.curve.p
    base = _to_raw(inst.base_point)
    target = _to_raw(inst.target)
    ops = _Ops()
    current: RawPoint = None
    l = 0
    while True:
        if current == target:
            _verify(inst, l)
            return AttackResult(l, ops.count, time.perf_counter() - start, "exhaustive")
        if l >= cap:
            raise CapExceeded(f"no logarithm within cap {cap}")
        current = ops.add(current, base, a, p)
        l += 1


def bsgs(inst: DlpInstance) -> AttackResult:
    """Baby-step giant-step: exact logarithm in about 2*sqrt(n) additions
    and sqrt(n) stored points."""
    start = time.perf_counter()
    a, p, n = inst.curve.a, inst.curve.p, inst.n
    base = _to_raw(inst.base_point)
    target = _to_raw(inst.target)
    ops = _Ops()

    m = math.isqrt(n - 1) + 1 if n > 1 else 1
    baby: Dict[RawPoint, int] = {}
    R: RawPoint = None
    for j in range(m):
        if R not in baby:
            baby[R] = j
        if j + 1 < m:
            R = ops.add(R, base, a, p)
    stride = ops.mul(m, base, a, p)
    neg_stride = _raw_neg(stride, p)
    gamma = target
    for i in range(m + 1):
        j = baby.get(gamma, -1)
        if j >= 0:
            l = (i * m + j) % n
            _verify(inst, l)
            return AttackResult(l, ops.count, time.perf_counter() - start, "bsgs")
        gamma = ops.add(gamma, neg_stride, a, p)
    raise OutOfSubgroup("giant steps exhausted the full residue range")


def pollard_rho(
    inst: DlpInstance,
    walkers: int = 1,
    rng: Optional[random.Random] = None,
    max_degenerate: int = 32,
) -> AttackResult:
    """Additive-walk rho with distinguished points.

    Walkers share one 32-branch walk function and a collision store keyed
    on distinguished points (trailing zero bits of x, tuned near
    sqrt(n)/walkers).  Walkers advance round-robin, so a fixed seed fixes
    the interleaving and therefore the answer.  Requires prime n.
    group_ops covers walk steps and walker starts; the shared branch table
    is precomputation.
    """
    start = time.perf_counter()
    n = inst.n
    if not is_prime(n):
        raise ValueError("rho needs a prime-order subgroup")
    if inst.target.infinity:
        return AttackResult(0, 0, time.perf_counter() - start, "rho")
    if walkers < 1:
        raise ValueError("walkers must be >= 1")
    rng = rng or random.Random(0xD1CE)
    a, p = inst.curve.a, inst.curve.p
    base = _to_raw(inst.base_point)
    target = _to_raw(inst.target)
    ops = _Ops()

    # The shared branch table is one-time precomputation, kept out of the
    # step count the cost law is stated over.
    nbranch = 32
    coeffs = [(rng.randrange(n), rng.randrange(n)) for _ in range(nbranch)]
    branch_pts = [
        _raw_add(_raw_mul(c, base, a, p), _raw_mul(d, target, a, p), a, p)
        for c, d in coeffs
    ]
    zbits = max(1, math.isqrt(n).bit_length() - 5)
    mask = (1 << zbits) - 1
    # A walker this long without a distinguished point is almost surely
    # trapped in a DP-free cycle; restart it from a fresh combination.
    dp_timeout = 20 << zbits

    def fresh_state():
        u, v = rng.randrange(n), rng.randrange(n)
        X = _raw_add(ops.mul(u, base, a, p), ops.mul(v, target, a, p), a, p)
        return [u, v, X, 0]

    states = [fresh_state() for _ in range(walkers)]
    store: Dict[RawPoint, Tuple[int, int]] = {}
    degenerate = 0
    step_budget = 200 * math.isqrt(n) + 100_000

    for _ in range(step_budget):
        for w, state in enumerate(states):
            u, v, X, idle = state
            if X is None:
                # u*P + v*Q is the identity: solve directly when v is invertible.
                if v % n != 0:
                    l = -u * pow(v, -1, n) % n
                    _verify(inst, l)
                    return AttackResult(l, ops.count, time.perf_counter() - start, "rho")
                states[w] = fresh_state()
                continue
            if X[0] & mask == 0:
                seen = store.get(X)
                if seen is not None:
                    u2, v2 = seen
                    if (v - v2) % n == 0:
                        degenerate += 1
                        if degenerate > max_degenerate:
                            raise DegenerateCollision(
                                f"{degenerate} non-invertible collisions"
                            )
                        states[w] = fresh_state()
                        continue
                    l = (u2 - u) * pow(v - v2, -1, n) % n
                    _verify(inst, l)
                    return AttackResult(l, ops.count, time.perf_counter() - start, "rho")
                store[X] = (u, v)
                state[3] = idle = 0
            if idle >= dp_timeout:
                states[w] = fresh_state()
                continue
            idx = (X[0] >> zbits) % nbranch
            state[0] = (u + coeffs[idx][0]) % n
            state[1] = (v + coeffs[idx][1]) % n
            state[2] = ops.add(X, branch_pts[idx], a, p)
            state[3] = idle + 1
    raise DegenerateCollision("step budget exhausted without a usable collision")


def pollard_lambda(
    inst: DlpInstance,
    low: int,
    high: int,
    rng: Optional[random.Random] = None,
    max_restarts: int = 4,
) -> AttackResult:
    """Tame/wild kangaroo search for l promised to lie in [low, high].

    Costs O(sqrt(width)) additions, far below sqrt(n) for narrow
    intervals.  Raises NotInInterval when the promise was false.
    """
    start = time.perf_counter()
    n = inst.n
    if not 0 <= low <= high < n:
        raise ValueError("need 0 <= low <= high < n")
    a, p = inst.curve.a, inst.curve.p
    base = _to_raw(inst.base_point)
    target = _to_raw(inst.target)
    ops = _Ops()
    rng = rng or random.Random(0x7A3B)
    width = high - low + 1

    if width <= 16:
        current = ops.mul(low, base, a, p)
        for l in range(low, high + 1):
            if current == target:
                _verify(inst, l)
                return AttackResult(l, ops.count, time.perf_counter() - start, "lambda")
            current = ops.add(current, base, a, p)
        raise NotInInterval(f"logarithm not in [{low}, {high}]")

    mean_target = max(1, math.isqrt(width) // 2)
    njumps = 1
    while ((1 << njumps) - 1) // njumps < mean_target:
        njumps += 1
    jumps = [1 << j for j in range(njumps)]
    mean_jump = sum(jumps) // njumps

    for attempt in range(max_restarts):
        salt = rng.randrange(1 << 30)
        jump_pts = [ops.mul(d, base, a, p) for d in jumps]

        def index(X: RawPoint) -> int:
            if X is None:
                return 0
            return (X[0] ^ salt) % njumps

        tame_steps = 4 * math.isqrt(width) + 16
        trap: Dict[RawPoint, int] = {}
        pos = high
        X = ops.mul(high, base, a, p)
        for _ in range(tame_steps):
            trap[X] = pos
            idx = index(X)
            pos += jumps[idx]
            X = ops.add(X, jump_pts[idx], a, p)
        trap[X] = pos

        distance = 0
        budget = (high - low) + tame_steps * mean_jump + 4 * mean_jump
        Y = target
        while distance <= budget:
            hit = trap.get(Y)
            if hit is not None:
                l = (hit - distance) % n
                if inst.curve.scalar_mul(l, inst.base_point) == inst.target:
                    return AttackResult(
                        l, ops.count, time.perf_counter() - start, "lambda"
                    )
            idx = index(Y)
            distance += jumps[idx]
            Y = ops.add(Y, jump_pts[idx], a, p)
    raise NotInInterval(f"logarithm not in [{low}, {high}] after {max_restarts} walks")


def _bsgs_core(
    curve: CurveParams, base: RawPoint, n: int, target: RawPoint, ops: _Ops
) -> int:
    """BSGS on raw points for the Pohlig-Hellman subproblems."""
    a, p = curve.a, curve.p
    m = math.isqrt(n - 1) + 1 if n > 1 else 1
    baby: Dict[RawPoint, int] = {}
    R: RawPoint = None
    for j in range(m):
        if R not in baby:
            baby[R] = j
        if j + 1 < m:
            R = ops.add(R, base, a, p)
    neg_stride = _raw_neg(ops.mul(m, base, a, p), p)
    gamma = target
    for i in range(m + 1):
        j = baby.get(gamma, -1)
        if j >= 0:
            return (i * m + j) % n
        gamma = ops.add(gamma, neg_stride, a, p)
    raise OutOfSubgroup("subproblem target outside the subgroup")


def pohlig_hellman(
    inst: DlpInstance, n_factors: Optional[Dict[int, int]] = None
) -> AttackResult:
    """Digit extraction per prime power of n, recombined with the CRT.

    Each base-q digit is a BSGS call in a subgroup of order q, so smooth n
    collapses the problem to far below sqrt(n) work.  n must be the exact
    order of the base point.
    """
    start = time.perf_counter()
    n = inst.n
    factors = dict(n_factors) if n_factors is not None else factorize(n)
    product = 1
    for q, e in factors.items():
        product *= q**e
    if product != n:
        raise BadFactorization(f"factors multiply to {product}, not {n}")

    a, p = inst.curve.a, inst.curve.p
    base = _to_raw(inst.base_point)
    target = _to_raw(inst.target)
    ops = _Ops()

    residues: List[int] = []
    moduli: List[int] = []
    for q, e in sorted(factors.items()):
        qe = q**e
        cof = n // qe
        P_i = ops.mul(cof, base, a, p)
        Q_i = ops.mul(cof, target, a, p)
        if P_i is None:
            raise BadFactorization("n is not the exact order of the base point")
        gamma = ops.mul(q ** (e - 1), P_i, a, p)
        x = 0
        for j in range(e):
            shifted = ops.add(Q_i, _raw_neg(ops.mul(x, P_i, a, p), p), a, p)
            R = ops.mul(q ** (e - 1 - j), shifted, a, p)
            digit = _bsgs_core(inst.curve, gamma, q, R, ops)
            x += digit * q**j
        residues.append(x)
        moduli.append(qe)
    l = crt(residues, moduli)
    _verify(inst, l)
    return AttackResult(l, ops.count, time.perf_counter() - start, "pohlig-hellman")
