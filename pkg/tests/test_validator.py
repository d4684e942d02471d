"""Criteria engine: catalog coverage, verdicts with evidence, soundness
against constructed weak subjects, monotonicity under policy tightening."""

import random

import pytest

from curvekit import CurveParams, CurvePoint, point_order
from curvekit.counting import count_exhaustive, trace_of
from curvekit.curve import OrderInfo
from curvekit.numtheory import factorize, is_prime
from curvekit.validator import (
    CRITERIA,
    InconsistentSubject,
    Subject,
    ValidatorPolicy,
    Verdict,
    run_criterion,
    validate,
)

TOY_POLICY = ValidatorPolicy(L=2, cofactor_max=1, require_prime_order=False)


def subject_for(E: CurveParams, G: CurvePoint, n=None, h=None) -> Subject:
    N = count_exhaustive(E)
    t = trace_of(E, N)
    if n is None:
        n = point_order(E, G, N, factorize(N))
        h = N // n
    return Subject(E, OrderInfo(N=N, t=t, n=n, h=h), G)


@pytest.fixture(scope="module")
def toy_subject(e511):
    return subject_for(e511, CurvePoint(0, 1))


class TestCatalog:
    def test_twelve_criteria(self):
        assert len(CRITERIA) == 12
        assert CRITERIA == (
            "C1_SUBGROUP_SIZE",
            "C2_NON_ANOMALOUS",
            "C3_UNIQUE_SUBGROUP",
            "ORDER_PRIME",
            "BASEPOINT_ORDER_PRIME",
            "NON_SUPERSINGULAR",
            "EMBEDDING_DEGREE",
            "COFACTOR",
            "B_NOT_SQUARE",
            "TWIST_SECURE",
            "CM_DISCRIMINANT",
            "HASSE_CONSISTENT",
        )

    def test_every_criterion_in_report_once(self, toy_subject):
        report = validate(toy_subject, TOY_POLICY)
        assert tuple(r.criterion for r in report.results) == CRITERIA

    def test_determinism(self, toy_subject):
        a = validate(toy_subject, TOY_POLICY)
        b = validate(toy_subject, TOY_POLICY)
        assert a == b

    def test_threaded_matches_sequential(self, toy_subject):
        assert validate(toy_subject, TOY_POLICY) == validate(
            toy_subject, TOY_POLICY, threads=4
        )

    def test_unknown_criterion(self, toy_subject):
        with pytest.raises(KeyError):
            run_criterion("NO_SUCH", toy_subject, TOY_POLICY)


class TestVerdicts:
    def test_e511_order_prime_fails(self, toy_subject):
        report = validate(toy_subject, TOY_POLICY)
        assert report.result("ORDER_PRIME").verdict is Verdict.FAIL  # 9 = 3^2
        assert not report.overall_pass

    def test_anomalous_subject_fails_c2(self):
        # E(5, 3, 2) has exactly 5 points
        E = CurveParams(5, 3, 2)
        assert count_exhaustive(E) == 5
        G = E.random_point(random.Random(1))
        subject = subject_for(E, G)
        result = run_criterion("C2_NON_ANOMALOUS", subject, TOY_POLICY)
        assert result.verdict is Verdict.FAIL

    def test_embedding_degree_fail_with_evidence(self):
        # E(13, 0, 4) has 21 points; its 7-torsion meets k = 2: 13^2 = 1 mod 7
        E = CurveParams(13, 0, 4)
        G = next(
            P
            for P in (E.random_point(random.Random(s)) for s in range(100))
            if point_order(E, P, 21, {3: 1, 7: 1}) == 7
        )
        subject = subject_for(E, G)
        assert subject.order.n == 7
        result = run_criterion("EMBEDDING_DEGREE", subject, ValidatorPolicy(L=2))
        assert result.verdict is Verdict.FAIL
        assert result.evidence["k"] == 2

    def test_supersingular_flagged(self):
        # j = 0 over p = 2 (mod 3) has trace zero
        E = CurveParams(11, 0, 1)
        G = E.random_point(random.Random(3))
        subject = subject_for(E, G)
        assert subject.order.t == 0
        result = run_criterion("NON_SUPERSINGULAR", subject, TOY_POLICY)
        assert result.verdict is Verdict.FAIL

    def test_hasse_consistent_passes_for_counted_orders(self, toy_subject):
        assert (
            run_criterion("HASSE_CONSISTENT", toy_subject, TOY_POLICY).verdict
            is Verdict.PASS
        )

    def test_b_square_advisory_by_default(self, e511):
        # b = 1 is a square mod 5
        subject = subject_for(e511, CurvePoint(0, 1))
        report = validate(subject, TOY_POLICY)
        result = report.result("B_NOT_SQUARE")
        assert result.verdict is Verdict.FAIL and result.advisory
        assert "B_NOT_SQUARE" in report.advisory_failures
        assert "B_NOT_SQUARE" not in report.failures

    def test_b_square_promotable(self, e511):
        subject = subject_for(e511, CurvePoint(0, 1))
        policy = ValidatorPolicy(L=2, require_b_nonsquare=True)
        report = validate(subject, policy)
        assert "B_NOT_SQUARE" in report.failures


class TestConsistency:
    def test_wrong_order_rejected(self, e511):
        bad = Subject(e511, OrderInfo(N=8, t=-2, n=8, h=1), CurvePoint(0, 1))
        with pytest.raises(InconsistentSubject):
            validate(bad, TOY_POLICY)

    def test_off_curve_point_rejected(self, e511):
        bad = Subject(e511, OrderInfo(N=9, t=-3, n=9, h=1), CurvePoint(1, 1))
        with pytest.raises(InconsistentSubject):
            validate(bad, TOY_POLICY)

    def test_infinity_base_rejected(self, e511):
        from curvekit import INFINITY

        bad = Subject(e511, OrderInfo(N=9, t=-3, n=9, h=1), INFINITY)
        with pytest.raises(InconsistentSubject):
            validate(bad, TOY_POLICY)


class TestTwistSecure:
    def test_prime_twist_passes(self, toy_subject):
        # twist order of E(5,1,1) is 3, prime
        result = run_criterion("TWIST_SECURE", toy_subject, TOY_POLICY)
        assert result.verdict is Verdict.PASS

    def test_smooth_twist_fails_at_desk_scale(self):
        # hunt a curve whose twist order is fully smooth and not near-prime
        rng = random.Random(40)
        from conftest import random_curve, random_prime_in

        policy = ValidatorPolicy(L=40, cofactor_max=4)
        found = False
        for _ in range(400):
            p = random_prime_in(rng, 1 << 14, 1 << 15)
            E = random_curve(rng, p)
            N = count_exhaustive(E)
            twist_order = 2 * p + 2 - N
            factors = factorize(twist_order)
            largest = max(factors)
            if is_prime(twist_order) or twist_order // largest <= 4:
                continue
            # every factor is far below 2^40, so the verdict must be Fail
            G = E.random_point(rng)
            subject = subject_for(E, G)
            result = run_criterion("TWIST_SECURE", subject, policy)
            assert result.verdict is Verdict.FAIL
            found = True
            break
        assert found


class TestCmDiscriminant:
    def test_tiny_discriminant_fails_when_threshold_raised(self):
        # CM curve over p = 11 with D = 7: |squarefree part| = 7
        from curvekit.cm import cm_generate

        result = cm_generate(11, prefer="larger")
        subject = Subject(result.curve, result.order, result.base_point)
        policy = ValidatorPolicy(L=2, discriminant_min=100)
        got = run_criterion("CM_DISCRIMINANT", subject, policy)
        assert got.verdict is Verdict.FAIL
        assert got.evidence["squarefree_part"] == -7

    def test_default_threshold_informational(self, toy_subject):
        got = run_criterion("CM_DISCRIMINANT", toy_subject, TOY_POLICY)
        assert got.verdict is Verdict.PASS


class TestMonotonicity:
    def test_strengthening_never_unfails(self):
        """Raising L or the embedding bound may only move verdicts toward
        Fail, never away from it."""
        from curvekit import generate

        suite = generate(20, seed=77)
        subject = suite.subject()
        weak = validate(subject, suite.policy)
        stronger_policies = [
            ValidatorPolicy(
                L=suite.policy.L + 10,
                embedding_bound=suite.policy.embedding_bound,
                discriminant_min=suite.policy.discriminant_min,
            ),
            ValidatorPolicy(
                L=suite.policy.L,
                embedding_bound=suite.policy.embedding_bound * 5,
                discriminant_min=suite.policy.discriminant_min,
            ),
        ]
        rank = {Verdict.PASS: 0, Verdict.INDETERMINATE: 1, Verdict.FAIL: 2}
        for policy in stronger_policies:
            strong = validate(subject, policy)
            for before, after in zip(weak.results, strong.results):
                if before.verdict is Verdict.FAIL:
                    assert rank[after.verdict] >= rank[Verdict.FAIL]


class TestPolicy:
    def test_validation(self):
        with pytest.raises(ValueError):
            ValidatorPolicy(L=0)
        with pytest.raises(ValueError):
            ValidatorPolicy(embedding_bound=0)

    def test_round_trip_dict(self):
        policy = ValidatorPolicy.desk_scale(40)
        assert ValidatorPolicy.from_dict(policy.to_dict()) == policy
