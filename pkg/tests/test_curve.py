"""Group law, scalar multiplication, compression and twists against
exhaustive enumeration on small curves."""

import random

import pytest

from curvekit import CurveParams, CurvePoint, INFINITY, new_curve, point_order
from curvekit.counting import count_exhaustive
from curvekit.curve import (
    BadOrder,
    NotOnCurve,
    NotPrime,
    OrderInfo,
    Singular,
    TrivialTwist,
    _raw_add,
    _raw_mul,
)
from curvekit.numtheory import factorize, legendre

from conftest import brute_order, brute_points, random_curve

SMALL_CURVES = [
    CurveParams(5, 1, 1),
    CurveParams(7, 2, 3),
    CurveParams(11, 5, 7),
    CurveParams(13, 0, 4),
    CurveParams(17, 3, 5),
    CurveParams(23, 9, 11),
    CurveParams(31, 4, 19),
]


class TestConstruction:
    def test_valid_curve(self):
        E = new_curve(5, 1, 1)
        assert (E.p, E.a, E.b) == (5, 1, 1)

    def test_zero_discriminant(self):
        with pytest.raises(Singular):
            new_curve(7, 0, 0)

    def test_singular_pair_found_by_scan(self):
        # brute-force scan over F_5 for 4a^3 + 27b^2 = 0
        singular = [
            (a, b)
            for a in range(5)
            for b in range(5)
            if (4 * a**3 + 27 * b * b) % 5 == 0 and (a, b) != (0, 0)
        ]
        assert singular
        for a, b in singular:
            with pytest.raises(Singular):
                new_curve(5, a, b)
        # the spec-sheet pair (5, 4, 2) is in fact non-singular
        assert (4, 2) not in singular
        new_curve(5, 4, 2)

    def test_composite_p_rejected(self):
        with pytest.raises(NotPrime):
            new_curve(15, 1, 1)

    def test_coefficients_reduced(self):
        E = new_curve(7, 9, -1)
        assert (E.a, E.b) == (2, 6)


class TestGroupLaw:
    def test_identity(self, e511):
        for P in brute_points(e511):
            assert e511.add(P, INFINITY) == P
            assert e511.add(INFINITY, P) == P

    def test_inverse_pair(self, e511):
        assert e511.add(CurvePoint(0, 1), CurvePoint(0, 4)) == INFINITY

    def test_double_example(self, e511):
        got = e511.double(CurvePoint(0, 1))
        assert got == CurvePoint(4, 2)
        assert e511.contains(got)

    def test_closure_exhaustive(self):
        for E in SMALL_CURVES:
            pts = brute_points(E)
            for P in pts:
                for Q in pts:
                    assert E.contains(E.add(P, Q))

    def test_inverses_exhaustive(self):
        for E in SMALL_CURVES:
            for P in pts_cache(E):
                assert E.add(P, E.negate(P)) == INFINITY

    def test_associativity_sampled(self):
        rng = random.Random(123)
        checked = 0
        while checked < 10_000:
            E = rng.choice(SMALL_CURVES)
            pts = pts_cache(E)
            P, Q, R = (rng.choice(pts) for _ in range(3))
            assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
            checked += 1

    def test_commutativity_exhaustive(self, e511):
        pts = brute_points(e511)
        for P in pts:
            for Q in pts:
                assert e511.add(P, Q) == e511.add(Q, P)


_PTS = {}


def pts_cache(E):
    key = (E.p, E.a, E.b)
    if key not in _PTS:
        _PTS[key] = brute_points(E)
    return _PTS[key]


class TestScalarMul:
    def test_zero_scalar(self, e511):
        assert e511.scalar_mul(0, CurvePoint(0, 1)) == INFINITY

    def test_spec_values(self, e511):
        P = CurvePoint(0, 1)
        assert e511.scalar_mul(5, P) == CurvePoint(3, 1)
        assert e511.scalar_mul(9, P) == INFINITY

    def test_matches_repeated_addition(self):
        for E in SMALL_CURVES:
            N = count_exhaustive(E)
            for P in pts_cache(E)[:6]:
                R = INFINITY
                for k in range(N + 1):
                    assert E.scalar_mul(k, P) == R
                    R = E.add(R, P)

    def test_negative_rejected(self, e511):
        with pytest.raises(ValueError):
            e511.scalar_mul(-1, CurvePoint(0, 1))

    def test_raw_matches_public(self, e511):
        rng = random.Random(5)
        for _ in range(100):
            P = rng.choice(pts_cache(e511))
            k = rng.randrange(20)
            raw = None if P.infinity else (P.x, P.y)
            got = _raw_mul(k, raw, e511.a, e511.p)
            want = e511.scalar_mul(k, P)
            assert got == (None if want.infinity else (want.x, want.y))


class TestRandomPoint:
    def test_on_curve_never_infinity(self, e511):
        rng = random.Random(17)
        seen = set()
        for _ in range(200):
            P = e511.random_point(rng)
            assert not P.infinity
            assert e511.contains(P)
            seen.add((P.x, P.y))
        # all 8 affine points of E(5,1,1) eventually appear
        assert len(seen) == 8

    def test_deterministic_given_seed(self, e511):
        a = [e511.random_point(random.Random(99)) for _ in range(5)]
        b = [e511.random_point(random.Random(99)) for _ in range(5)]
        assert a == b


class TestCompression:
    def test_round_trip_examples(self, e511):
        assert e511.compress(CurvePoint(0, 1)) == (0, 1)
        assert e511.decompress(0, 1) == CurvePoint(0, 1)
        assert e511.compress(CurvePoint(4, 2)) == (4, 0)
        assert e511.decompress(4, 0) == CurvePoint(4, 2)

    def test_not_on_curve(self, e511):
        with pytest.raises(NotOnCurve):
            e511.decompress(1, 0)

    def test_round_trip_every_point(self):
        for E in SMALL_CURVES:
            for P in pts_cache(E):
                if P.infinity:
                    continue
                x, sign = E.compress(P)
                assert E.decompress(x, sign) == P

    def test_identity_not_compressible(self, e511):
        with pytest.raises(ValueError):
            e511.compress(INFINITY)


class TestTwist:
    def test_example(self, e511):
        twisted = e511.twist(2)
        assert (twisted.a, twisted.b) == (4, 3)
        assert count_exhaustive(twisted) == 3
        assert count_exhaustive(e511) + 3 == 2 * 5 + 2

    def test_square_coefficient_rejected(self, e511):
        with pytest.raises(TrivialTwist):
            e511.twist(4)

    def test_square_coefficient_preserves_order(self, e511):
        twisted = e511.twist(4, allow_trivial=True)
        assert count_exhaustive(twisted) == count_exhaustive(e511)

    def test_zero_rejected(self, e511):
        with pytest.raises(ValueError):
            e511.twist(0)

    def test_order_identity_exhaustive(self):
        rng = random.Random(31)
        from curvekit.numtheory import small_primes

        primes = [p for p in small_primes(1 << 12) if p > 3]
        for _ in range(60):
            p = rng.choice(primes)
            E = random_curve(rng, p)
            c = rng.randrange(1, p)
            while legendre(c, p) != -1:
                c = rng.randrange(1, p)
            assert count_exhaustive(E) + count_exhaustive(E.twist(c)) == 2 * p + 2


class TestPointOrder:
    def test_spec_example(self, e511):
        P = CurvePoint(0, 1)
        assert e511.scalar_mul(3, P) == CurvePoint(2, 1)
        assert point_order(e511, P, 9, {3: 2}) == 9

    def test_identity(self, e511):
        assert point_order(e511, INFINITY, 9, {3: 2}) == 1

    def test_wrong_order_raises(self, e511):
        with pytest.raises(BadOrder):
            point_order(e511, CurvePoint(0, 1), 8, {2: 3})

    def test_matches_brute_force(self):
        for E in SMALL_CURVES:
            N = count_exhaustive(E)
            factors = factorize(N)
            for P in pts_cache(E):
                if P.infinity:
                    continue
                assert point_order(E, P, N, factors) == brute_order(E, P)


class TestOrderInfo:
    def test_cofactor_identity_enforced(self):
        with pytest.raises(ValueError):
            OrderInfo(N=10, t=1, n=3, h=2)

    def test_valid(self):
        info = OrderInfo(N=9, t=-3, n=9, h=1)
        assert info.n * info.h == info.N
