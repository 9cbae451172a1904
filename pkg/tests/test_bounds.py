import itertools

import pytest

from sumsetlab.bounds import (
    APDescriptor,
    ap_intersect,
    ap_intersection_exhaustive,
    freiman_3k3_check,
    freiman_exhaustive,
    is_prime,
    minimal_covering_progression,
    pollard_check,
    pollard_exhaustive,
    pollard_random,
    primes_up_to,
)
from sumsetlab.errors import HypothesisNotMet
from sumsetlab.setcore import CycSet, IntSet


class TestPrimality:
    def test_small_values(self):
        assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]
        assert primes_up_to(31)[-1] == 31


class TestPollardCheck:
    def test_progression_equality(self):
        chk = pollard_check(CycSet.of(7, [0, 1, 2]), CycSet.of(7, [0, 1, 2]), 2)
        assert (chk.lhs, chk.rhs, chk.holds) == (8, 8, True)

    def test_full_group(self):
        G = CycSet.of(5, range(5))
        chk = pollard_check(G, G, 5)
        assert (chk.lhs, chk.rhs) == (25, 25)

    def test_threshold_one(self):
        A, B = CycSet.of(11, [0, 1, 2, 3]), CycSet.of(11, [0, 2, 4])
        chk = pollard_check(A, B, 1)
        # lhs is the sumset size: {0..7} has 8 elements
        assert (chk.lhs, chk.rhs, chk.holds) == (8, 6, True)

    def test_rejects_composite_modulus(self):
        with pytest.raises(ValueError, match="not prime"):
            pollard_check(CycSet.of(8, [0, 1]), CycSet.of(8, [0, 1]), 1)

    def test_rejects_threshold_outside_window(self):
        A = CycSet.of(7, [0, 1, 2])
        with pytest.raises(ValueError, match="window"):
            pollard_check(A, A, 4)
        with pytest.raises(ValueError, match="modulus mismatch"):
            pollard_check(A, CycSet.of(11, [0, 1]), 1)

    def test_exhaustive_small(self):
        rep = pollard_exhaustive(5)
        assert rep.ok and rep.instances == 2324

    def test_random_instances(self):
        rep = pollard_random(19, 400, seed=1)
        assert rep.ok and rep.instances == 400


class TestFreiman:
    def test_even_progression(self):
        out = freiman_3k3_check(IntSet.of([0, 2, 4, 6]))
        assert out.progression == APDescriptor(0, 2, 4)
        assert out.check.holds and out.check.lhs == 4 and out.check.rhs == 4

    def test_hypothesis_boundary_not_met(self):
        with pytest.raises(HypothesisNotMet) as info:
            freiman_3k3_check(IntSet.of([0, 1, 10]))
        assert info.value.reason == "doubling-too-large"
        assert info.value.payload["sumset_size"] == 6
        with pytest.raises(HypothesisNotMet):
            freiman_3k3_check(IntSet.of([0, 1]))

    def test_needs_two_elements(self):
        with pytest.raises(ValueError):
            freiman_3k3_check(IntSet.of([3]))

    def test_minimal_progression_uses_gap_gcd(self):
        P = minimal_covering_progression(IntSet.of([0, 6, 9]))
        assert (P.start, P.step, P.length) == (0, 3, 4)

    def test_exhaustive(self):
        rep = freiman_exhaustive(12)
        assert rep.ok and rep.instances > 0


class TestAPDescriptor:
    def test_elements(self):
        assert APDescriptor(2, 3, 4).elements() == (2, 5, 8, 11)
        assert APDescriptor(5, 3, 4, modulus=7).elements() == (5, 1, 4, 0)

    def test_distinctness_enforced_mod_n(self):
        with pytest.raises(ValueError):
            APDescriptor(0, 2, 5, modulus=8)
        with pytest.raises(ValueError):
            APDescriptor(0, 0, 2, modulus=5)

    def test_json(self):
        assert APDescriptor(1, 2, 3).to_json()["ambient"] == "Z"
        assert APDescriptor(1, 2, 3, modulus=11).to_json()["ambient"] == 11


class TestAPIntersect:
    def test_interval_meets_even_progression(self):
        P = APDescriptor(0, 1, 7, modulus=29)
        Q = APDescriptor(0, 2, 4, modulus=29)
        out = ap_intersect(P, Q)
        assert (out.start, out.step, out.length) == (0, 2, 4)

    def test_containment_returns_q(self):
        P = APDescriptor(0, 1, 7, modulus=31)
        Q = APDescriptor(2, 1, 3, modulus=31)
        out = ap_intersect(P, Q)
        assert out.element_set() == Q.element_set()
        assert out.step == 1 and out.length == 3

    def test_sparse_intersection_not_met(self):
        P = APDescriptor(0, 1, 4, modulus=13)
        Q = APDescriptor(0, 5, 5, modulus=13)
        with pytest.raises(HypothesisNotMet) as info:
            ap_intersect(P, Q)
        assert info.value.payload["intersection"] == [0, 2]

    def test_step_sign_normalized(self):
        # Q runs backward; the result step lands in (0, p/2]
        P = APDescriptor(0, 1, 7, modulus=29)
        Q = APDescriptor(6, 27, 4, modulus=29)  # 6, 4, 2, 0
        out = ap_intersect(P, Q)
        assert out.step == 2 and out.element_set() == {0, 2, 4, 6}

    def test_wide_window_rejected(self):
        P = APDescriptor(0, 1, 8, modulus=29)  # 8 > 29/4
        Q = APDescriptor(0, 1, 4, modulus=29)
        with pytest.raises(HypothesisNotMet):
            ap_intersect(P, Q)

    def test_modulus_rules(self):
        with pytest.raises(ValueError):
            ap_intersect(APDescriptor(0, 1, 2, modulus=13), APDescriptor(0, 1, 2, modulus=11))
        with pytest.raises(ValueError):
            ap_intersect(APDescriptor(0, 1, 2, modulus=15), APDescriptor(0, 1, 2, modulus=15))
        with pytest.raises(ValueError):
            ap_intersect(APDescriptor(0, 1, 2), APDescriptor(0, 1, 2))


def all_ap_descriptors(p, max_len):
    for length in range(1, max_len + 1):
        for start in range(p):
            if length == 1:
                yield APDescriptor(start, 1, 1, modulus=p)
                continue
            for step in range(1, p):
                if length <= p:
                    yield APDescriptor(start, step, length, modulus=p)


class TestAPIntersectionSweep:
    def test_matches_direct_enumeration(self):
        """The dilation-reduced sweep covers exactly the raw (P-set, Q) pairs."""
        for p in (11, 13):
            p_sets = {}
            for P in all_ap_descriptors(p, p // 4):
                p_sets.setdefault(P.element_set(), P)
            q_descs = [(Q, Q.element_set()) for Q in all_ap_descriptors(p, p)]
            direct = 0
            for pset, P in p_sets.items():
                for Q, qset in q_descs:
                    inter = pset & qset
                    if 2 * len(inter) >= Q.length + 2:
                        direct += 1
                        out = ap_intersect(P, Q)  # must not raise
                        assert out.element_set() == inter
            reduced = (
                ap_intersection_exhaustive(p).instances
                - ap_intersection_exhaustive(p - 1).instances
            )
            assert reduced * (p - 1) == direct

    def test_sweep_small(self):
        rep = ap_intersection_exhaustive(17)
        assert rep.ok
