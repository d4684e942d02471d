"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own fast paths: points
are enumerated by scanning all (x, y) pairs, orders by repeated addition,
and so on, so that library results are checked against something simpler.
"""

import math
import random

import pytest

from curvekit import CurveParams, CurvePoint, INFINITY, DlpInstance
from curvekit.counting import count_bsgs, count_exhaustive, curve_order
from curvekit.curve import OrderInfo
from curvekit.numtheory import factorize, is_prime, small_primes


def brute_points(E: CurveParams):
    """Every point of E by scanning all coordinate pairs, plus identity."""
    pts = [INFINITY]
    for x in range(E.p):
        rhs = E.rhs(x)
        for y in range(E.p):
            if y * y % E.p == rhs:
                pts.append(CurvePoint(x, y))
    return pts


def brute_order(E: CurveParams, P: CurvePoint) -> int:
    """Order of P by repeated addition."""
    k, R = 1, P
    while not R.infinity:
        R = E.add(R, P)
        k += 1
    return k


def random_prime_in(rng: random.Random, lo: int, hi: int) -> int:
    while True:
        candidate = rng.randrange(lo, hi) | 1
        if is_prime(candidate):
            return candidate


def random_curve(rng: random.Random, p: int) -> CurveParams:
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * pow(a, 3, p) + 27 * b * b) % p != 0:
            return CurveParams(p, a, b)


@pytest.fixture(scope="session")
def e511():
    """The 9-point toy curve used across the suite."""
    return CurveParams(5, 1, 1)


@pytest.fixture(scope="session")
def e511_instance(e511):
    return DlpInstance(e511, CurvePoint(0, 1), 9, CurvePoint(3, 1))


def make_instance(curve, base, n, l):
    return DlpInstance(curve, base, n, curve.scalar_mul(l, base)), l


def prime_order_curve(bits: int, seed: int):
    """Curve with prime order plus a generator, for attack tests.

    Lighter than the full generation chain: only primality of the order
    is demanded.
    """
    rng = random.Random(seed)
    p = random_prime_in(rng, 1 << (bits - 1), 1 << bits)
    while True:
        E = random_curve(rng, p)
        N = curve_order(E, rng)
        if is_prime(N):
            return E, N, E.random_point(rng)


def find_smooth_curve(bits: int, smooth_bound: int, rng: random.Random):
    """Random curve whose order is smooth_bound-smooth, with its factors.

    Random search with exact counting; a few percent of curves qualify at
    the 2^16-smooth 48-bit setting.
    """
    while True:
        p = random_prime_in(rng, 1 << (bits - 1), 1 << bits)
        for _ in range(8):
            E = random_curve(rng, p)
            try:
                N = curve_order(E, rng)
            except Exception:
                continue
            factors = factorize(N)
            if max(factors) <= smooth_bound:
                return E, N, factors


def smooth_subgroup_instance(bits: int, smooth_bound: int, seed: int):
    """DLP instance on a smooth-order curve: base point of large smooth
    order, random target, plus the order info for validation."""
    rng = random.Random(seed)
    E, N, factors = find_smooth_curve(bits, smooth_bound, rng)
    from curvekit import point_order

    while True:
        P = E.random_point(rng)
        n = point_order(E, P, N, factors)
        if n >= N // 16 and n > smooth_bound:
            break
    l = rng.randrange(n)
    inst = DlpInstance(E, P, n, E.scalar_mul(l, P))
    order = OrderInfo(N=N, t=E.p + 1 - N, n=n, h=N // n)
    return inst, l, order
