"""Short Weierstrass curves y^2 = x^3 + ax + b over prime fields.

Affine coordinates throughout with explicit field inversions: at desk
scale the formulas stay auditable and projective tricks buy nothing.
All types are immutable values and all operations are pure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

from .numtheory import is_prime, legendre, sqrt_mod

__all__ = [
    "Singular",
    "NotPrime",
    "TrivialTwist",
    "NotOnCurve",
    "BadOrder",
    "CurvePoint",
    "INFINITY",
    "CurveParams",
    "OrderInfo",
    "new_curve",
    "point_order",
]


class Singular(ValueError):
    """4a^3 + 27b^2 = 0 (mod p): the cubic has a repeated root."""


class NotPrime(ValueError):
    """The field characteristic failed the primality test."""


class TrivialTwist(ValueError):
    """Twist coefficient is a square, so the twist is isomorphic to E."""


class NotOnCurve(ValueError):
    """No point with the given abscissa exists on the curve."""


class BadOrder(RuntimeError):
    """A claimed group order does not annihilate the point."""


@dataclass(frozen=True, slots=True)
class CurvePoint:
    """Affine point or the identity (both coordinates None)."""

    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def infinity(self) -> bool:
        return self.x is None


INFINITY = CurvePoint()

# Raw points for hot loops: (x, y) tuples with None as the identity.
RawPoint = Optional[Tuple[int, int]]


def _raw_neg(P: RawPoint, p: int) -> RawPoint:
    if P is None:
        return None
    x, y = P
    return (x, (p - y) % p)


def _raw_add(P: RawPoint, Q: RawPoint, a: int, p: int) -> RawPoint:
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        slope = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        slope = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (slope * slope - x1 - x2) % p
    return (x3, (slope * (x1 - x3) - y1) % p)


def _raw_mul(k: int, P: RawPoint, a: int, p: int) -> RawPoint:
    if k < 0:
        raise ValueError("scalar must be non-negative")
    acc: RawPoint = None
    addend = P
    while k:
        if k & 1:
            acc = _raw_add(acc, addend, a, p)
        addend = _raw_add(addend, addend, a, p)
        k >>= 1
    return acc


def _to_raw(P: CurvePoint) -> RawPoint:
    return None if P.infinity else (P.x, P.y)


def _from_raw(P: RawPoint) -> CurvePoint:
    return INFINITY if P is None else CurvePoint(P[0], P[1])


@dataclass(frozen=True, slots=True)
class CurveParams:
    """Validated curve y^2 = x^3 + ax + b over F_p, p > 3 prime.

    Construction checks non-singularity; use new_curve() to also check
    primality of p.
    """

    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p <= 3:
            raise ValueError("field characteristic must exceed 3")
        if not (0 <= self.a < self.p and 0 <= self.b < self.p):
            raise ValueError("coefficients must be reduced mod p")
        if self.discriminant_zero():
            raise Singular(f"4a^3 + 27b^2 = 0 (mod {self.p})")

    def discriminant_zero(self) -> bool:
        return (4 * pow(self.a, 3, self.p) + 27 * self.b * self.b) % self.p == 0

    def rhs(self, x: int) -> int:
        """x^3 + ax + b mod p."""
        return (pow(x, 3, self.p) + self.a * x + self.b) % self.p

    def contains(self, P: CurvePoint) -> bool:
        if P.infinity:
            return True
        return (P.y * P.y - self.rhs(P.x)) % self.p == 0

    def negate(self, P: CurvePoint) -> CurvePoint:
        return _from_raw(_raw_neg(_to_raw(P), self.p))

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        """Group law: identity, inverse pair, tangent and chord cases."""
        return _from_raw(_raw_add(_to_raw(P), _to_raw(Q), self.a, self.p))

    def double(self, P: CurvePoint) -> CurvePoint:
        return self.add(P, P)

    def scalar_mul(self, k: int, P: CurvePoint) -> CurvePoint:
        """k*P by double-and-add; 0*P is the identity, negative k rejected."""
        return _from_raw(_raw_mul(k, _to_raw(P), self.a, self.p))

    def random_point(self, rng: random.Random) -> CurvePoint:
        """Uniform-ish affine point: sample x until the cubic is a square,
        then pick the sign of y with one random bit.  Never the identity."""
        while True:
            x = rng.randrange(self.p)
            rhs = self.rhs(x)
            if legendre(rhs, self.p) < 0:
                continue
            y = sqrt_mod(rhs, self.p)
            assert y is not None
            if rng.randrange(2) and y != 0:
                y = self.p - y
            return CurvePoint(x, y)

    def compress(self, P: CurvePoint) -> Tuple[int, int]:
        """Affine point to (x, sign) with sign the least bit of y."""
        if P.infinity:
            raise ValueError("the identity has no compressed form")
        if not self.contains(P):
            raise NotOnCurve(f"({P.x}, {P.y}) not on the curve")
        return (P.x, P.y & 1)

    def decompress(self, x: int, sign: int) -> CurvePoint:
        """Inverse of compress: recover y from x and the sign bit."""
        if not 0 <= x < self.p:
            raise ValueError("x must be reduced mod p")
        if sign not in (0, 1):
            raise ValueError("sign must be a single bit")
        y = sqrt_mod(self.rhs(x), self.p)
        if y is None:
            raise NotOnCurve(f"x = {x} is not an abscissa on this curve")
        if y & 1 != sign:
            y = (self.p - y) % self.p
        if y & 1 != sign:
            # y = 0 and sign = 1: no such point.
            raise NotOnCurve(f"no point with x = {x} and odd y")
        return CurvePoint(x, y)

    def twist(self, c: int, allow_trivial: bool = False) -> "CurveParams":
        """Quadratic twist by c: y^2 = x^3 + a*c^2*x + b*c^3.

        For non-square c the twist order pairs with E's as 2p + 2 - #E.
        Square c yields an isomorphic curve and is rejected unless
        allow_trivial is set.
        """
        c %= self.p
        if c == 0:
            raise ValueError("twist coefficient must be non-zero")
        if legendre(c, self.p) == 1 and not allow_trivial:
            raise TrivialTwist(f"{c} is a square mod {self.p}")
        c2 = c * c % self.p
        return CurveParams(self.p, self.a * c2 % self.p, self.b * c2 * c % self.p)

    def points(self) -> Iterator[CurvePoint]:
        """All points including the identity, by x-sweep.  Small p only."""
        yield INFINITY
        for x in range(self.p):
            rhs = self.rhs(x)
            sym = legendre(rhs, self.p)
            if sym == 0:
                yield CurvePoint(x, 0)
            elif sym == 1:
                y = sqrt_mod(rhs, self.p)
                yield CurvePoint(x, y)
                yield CurvePoint(x, self.p - y)


def new_curve(p: int, a: int, b: int, rounds: int = 40) -> CurveParams:
    """Validated curve constructor: checks p prime (NotPrime) and the
    discriminant (Singular).  Coefficients are reduced mod p."""
    if p <= 3 or not is_prime(p, rounds):
        raise NotPrime(f"{p} is not an odd prime > 3")
    return CurveParams(p, a % p, b % p)


@dataclass(frozen=True)
class OrderInfo:
    """Curve order N, trace t, base point order n and cofactor h = N / n."""

    N: int
    t: int
    n: int
    h: int

    def __post_init__(self):
        if self.N < 1 or self.n < 1 or self.h < 1:
            raise ValueError("orders must be positive")
        if self.n * self.h != self.N:
            raise ValueError("cofactor identity n * h = N violated")


def point_order(
    E: CurveParams, P: CurvePoint, N: int, N_factors: Dict[int, int]
) -> int:
    """Exact multiplicative order of P given a multiple N of it and N's
    factorization: divide out primes while the scaled point stays at the
    identity.  Raises BadOrder when N*P is not the identity."""
    raw = _to_raw(P)
    if _raw_mul(N, raw, E.a, E.p) is not None:
        raise BadOrder(f"{N} * P is not the identity")
    order = N
    for q in N_factors:
        while order % q == 0 and _raw_mul(order // q, raw, E.a, E.p) is None:
            order //= q
    return order
