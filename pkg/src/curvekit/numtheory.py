"""Prime-field number theory: primality, shaped primes, square roots,
the 4p = t^2 + D*s^2 decomposition, embedding degrees and bounded
squarefree-part extraction.

Everything here is pure: randomness is always an explicit argument, so
all functions are safe to call concurrently.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

__all__ = [
    "ShapeExhausted",
    "Crandall",
    "MontgomeryFriendly",
    "Mersenne",
    "RandomPrime",
    "PrimeShape",
    "GeneratedPrime",
    "SquarefreeResult",
    "is_prime",
    "gen_prime",
    "legendre",
    "sqrt_mod",
    "tonelli_shanks",
    "cornacchia",
    "embedding_degree",
    "squarefree_part",
    "small_primes",
    "trial_division",
    "factorize",
    "crt",
]

# Below this bound primality is decided by trial division, which is exact.
_DETERMINISTIC_BOUND = 1 << 16

_FIRST_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ShapeExhausted(RuntimeError):
    """No prime of the requested exact form exists within the search budget."""


# ---------------------------------------------------------------------------
# primality


def is_prime(n: int, rounds: int = 40) -> bool:
    """Primality test: exact below 2^16 (trial division), Miller-Rabin above.

    For large n a True answer is wrong with probability at most 4**-rounds.
    Witness bases are drawn from a PRNG seeded with n itself, so the result
    is deterministic per input.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if n < 2:
        return False
    for q in _FIRST_PRIMES:
        if n % q == 0:
            return n == q
    if n < _DETERMINISTIC_BOUND:
        d = 41
        while d * d <= n:
            if n % d == 0:
                return False
            d += 2
        return True

    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# shaped prime generation


@dataclass(frozen=True)
class Crandall:
    """p = 2^alpha - gamma with gamma odd and below 2^10."""

    alpha: int
    gamma: int

    def __post_init__(self):
        if not (0 < self.gamma < 1024 and self.gamma % 2 == 1):
            raise ValueError("Crandall gamma must be odd and < 2^10")
        if (1 << self.alpha) <= self.gamma + 1:
            raise ValueError("Crandall alpha too small for gamma")

    def candidate(self) -> int:
        return (1 << self.alpha) - self.gamma


@dataclass(frozen=True)
class MontgomeryFriendly:
    """p = 2^alpha * (2^beta - gamma) - 1."""

    alpha: int
    beta: int
    gamma: int

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("parameters must be non-negative")
        if (1 << self.beta) <= self.gamma:
            raise ValueError("2^beta must exceed gamma")

    def candidate(self) -> int:
        return (1 << self.alpha) * ((1 << self.beta) - self.gamma) - 1


@dataclass(frozen=True)
class Mersenne:
    """p = 2^k - 1."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")

    def candidate(self) -> int:
        return (1 << self.k) - 1


@dataclass(frozen=True)
class RandomPrime:
    """A random prime of exactly `bits` bits, no special structure."""

    bits: int

    def __post_init__(self):
        if self.bits < 8:
            raise ValueError("random primes need at least 8 bits")


PrimeShape = Union[Crandall, MontgomeryFriendly, Mersenne, RandomPrime]


@dataclass(frozen=True)
class GeneratedPrime:
    """A generated prime together with the shape that produced it."""

    value: int
    shape: PrimeShape

    @property
    def three_mod_four(self) -> bool:
        """True when p = 3 (mod 4), which admits the fast square-root path."""
        return self.value % 4 == 3


def gen_prime(
    shape: PrimeShape,
    rng: Optional[random.Random] = None,
    rounds: int = 40,
    max_attempts: Optional[int] = None,
) -> GeneratedPrime:
    """Generate a prime of the given shape.

    Fixed-form shapes (Crandall, MontgomeryFriendly, Mersenne) determine a
    single candidate; RandomPrime searches random odd candidates of the exact
    bit length.  Raises ShapeExhausted when the form admits no prime within
    the attempt budget.
    """
    if isinstance(shape, RandomPrime):
        if rng is None:
            raise ValueError("RandomPrime requires a randomness source")
        bits = shape.bits
        budget = max_attempts if max_attempts is not None else 128 * bits
        lo, hi = 1 << (bits - 1), 1 << bits
        for _ in range(budget):
            candidate = rng.randrange(lo, hi) | 1
            if is_prime(candidate, rounds):
                return GeneratedPrime(candidate, shape)
        raise ShapeExhausted(f"no {bits}-bit prime found in {budget} attempts")

    candidate = shape.candidate()
    if not is_prime(candidate, rounds):
        raise ShapeExhausted(f"{candidate} (from {shape}) is composite")
    return GeneratedPrime(candidate, shape)


# ---------------------------------------------------------------------------
# quadratic residues and square roots


def legendre(c: int, p: int) -> int:
    """Legendre symbol (c|p) for odd prime p: 0, +1 or -1."""
    c %= p
    if c == 0:
        return 0
    return 1 if pow(c, (p - 1) // 2, p) == 1 else -1


def tonelli_shanks(c: int, p: int) -> Optional[int]:
    """General square root mod odd prime p; returns some root or None.

    Runs the full descent regardless of p mod 4, so it stays an
    independent route from the p = 3 (mod 4) shortcut in sqrt_mod.
    Makes no canonical choice; see sqrt_mod for the canonical wrapper.
    """
    c %= p
    if c == 0:
        return 0
    if legendre(c, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m = s
    b = pow(z, q, p)
    t = pow(c, q, p)
    r = pow(c, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        w = pow(b, 1 << (m - i - 1), p)
        m = i
        b = w * w % p
        t = t * b % p
        r = r * w % p
    return r


def sqrt_mod(c: int, p: int) -> Optional[int]:
    """Canonical square root of c mod odd prime p, or None for non-residues.

    Uses c^((p+1)/4) when p = 3 (mod 4), Tonelli-Shanks otherwise.  Of the
    two roots {r, p-r} the one with even least-significant bit is returned.
    """
    c %= p
    if c == 0:
        return 0
    if legendre(c, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(c, (p + 1) // 4, p)
    else:
        r = tonelli_shanks(c, p)
        assert r is not None
    return r if r % 2 == 0 else p - r


# ---------------------------------------------------------------------------
# 4p = t^2 + D s^2


def cornacchia(p: int, D: int) -> Optional[Tuple[int, int]]:
    """Solve 4p = t^2 + D*s^2 for odd prime p and D = 0 or 3 (mod 4).

    Returns (t, s) with t, s > 0, or None when no representation exists.
    Classical reduced square-root descent on 2p.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd prime")
    if D <= 0 or D % 4 not in (0, 3):
        raise ValueError("D must be positive and = 0 or 3 (mod 4)")
    if D >= 4 * p:
        return None
    r = sqrt_mod(-D % p, p)
    if r is None:
        return None
    # Lift the root mod p to a root of t^2 = -D (mod 4p): parity must match D.
    if (r - D) % 2 != 0:
        r = p - r
    a, b = 2 * p, r
    limit = math.isqrt(4 * p)
    while b > limit:
        a, b = b, a % b
    if b == 0:
        return None
    rem = 4 * p - b * b
    if rem % D != 0:
        return None
    s2 = rem // D
    s = math.isqrt(s2)
    if s == 0 or s * s != s2:
        return None
    return b, s


# ---------------------------------------------------------------------------
# embedding degree


def embedding_degree(n: int, p: int, bound: int = 100) -> Optional[int]:
    """Smallest k <= bound with n | p^k - 1, or None when every k <= bound fails.

    None is the good outcome for curve safety: no small pairing transfer
    exists up to the bound.  Computed by successive modular multiplication.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if math.gcd(n, p) != 1:
        raise ValueError("n and p must be coprime")
    acc = p % n
    for k in range(1, bound + 1):
        if acc == 1:
            return k
        acc = acc * p % n
    return None


# ---------------------------------------------------------------------------
# factoring support


_sieve_limit = 0
_sieve_primes: List[int] = []


def small_primes(limit: int) -> List[int]:
    """All primes <= limit, cached across calls."""
    global _sieve_limit, _sieve_primes
    if limit > _sieve_limit:
        size = max(limit, 1 << 16)
        sieve = bytearray([1]) * (size + 1)
        sieve[0] = sieve[1] = 0
        for i in range(2, math.isqrt(size) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _sieve_primes = [i for i, flag in enumerate(sieve) if flag]
        _sieve_limit = size
    if limit == _sieve_limit:
        return _sieve_primes
    cut = len(_sieve_primes)
    while cut and _sieve_primes[cut - 1] > limit:
        cut -= 1
    return _sieve_primes[:cut]


def trial_division(n: int, bound: int) -> Tuple[Dict[int, int], int, int]:
    """Strip prime factors <= bound from n > 0.

    Returns (factors, cofactor, primes_tried).  The cofactor has no prime
    factor <= min(bound, its own square root).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    factors: Dict[int, int] = {}
    tried = 0
    for q in small_primes(bound):
        if q * q > n:
            break
        tried += 1
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            factors[q] = e
    if n > 1 and n <= bound:
        factors[n] = factors.get(n, 0) + 1
        n = 1
    return factors, n, tried


def _brent_rho(n: int) -> int:
    """Some non-trivial factor of odd composite n (Brent's cycle method)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 256):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise RuntimeError(f"rho factoring failed for {n}")


def factorize(n: int) -> Dict[int, int]:
    """Complete prime factorization of n >= 1 (desk-scale sizes).

    Trial division below 10^4, then recursive Brent rho splitting.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    factors, cofactor, _ = trial_division(n, 10_000)
    stack = [cofactor] if cofactor > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack.extend((root, root))
            continue
        d = _brent_rho(m)
        stack.extend((d, m // d))
    return factors


@dataclass(frozen=True)
class SquarefreeResult:
    """Outcome of bounded squarefree-part extraction.

    d is exact when complete is True; otherwise d still contains the
    unfactored cofactor, which may hide further square factors.
    """

    d: int
    complete: bool
    effort_used: int


def squarefree_part(m: int, effort: int = 10**6) -> SquarefreeResult:
    """Squarefree part of m != 0 by trial division up to `effort`.

    Square factors of primes <= effort are stripped exactly.  The remaining
    cofactor is resolved when it is 1, prime, or a perfect square; otherwise
    the result is marked incomplete and the cofactor is retained in d.
    The true squarefree part always divides the returned d.
    """
    if m == 0:
        raise ValueError("m must be non-zero")
    if effort < 1:
        raise ValueError("effort must be positive")
    sign = -1 if m < 0 else 1
    factors, cofactor, tried = trial_division(abs(m), effort)
    d = 1
    for q, e in factors.items():
        if e % 2 == 1:
            d *= q
    if cofactor == 1:
        return SquarefreeResult(sign * d, True, tried)
    if is_prime(cofactor):
        return SquarefreeResult(sign * d * cofactor, True, tried)
    root = math.isqrt(cofactor)
    if root * root == cofactor:
        # A square cofactor contributes nothing to the squarefree part.
        return SquarefreeResult(sign * d, True, tried)
    return SquarefreeResult(sign * d * cofactor, False, tried)


# ---------------------------------------------------------------------------
# Chinese remainder theorem


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Combine x = r_i (mod m_i) for pairwise coprime moduli."""
    if len(residues) != len(moduli) or not moduli:
        raise ValueError("need matching non-empty residue/modulus lists")
    x, m = residues[0] % moduli[0], moduli[0]
    for r, q in zip(residues[1:], moduli[1:]):
        delta = (r - x) % q
        x += m * (delta * pow(m, -1, q) % q)
        m *= q
    return x % m
