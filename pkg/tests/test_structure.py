import logging
from fractions import Fraction

import numpy as np
import pytest

from sumsetlab.bounds import APDescriptor
from sumsetlab.errors import ContractViolation, HypothesisNotMet
from sumsetlab.setcore import CycSet, IntSet, convolution, truncated_sum
from sumsetlab.structure import (
    ProgressionCover,
    find_subgroup,
    random_recovery_instance,
    recover_progression,
    recovery_contract_random,
    wrap,
    wrap_contract_exhaustive,
    wrap_contract_random,
)


class TestWrap:
    def test_interval_merges_endpoints(self):
        wr = wrap(IntSet.of(range(10)), 1)
        assert (wr.n, wr.x) == (9, 0)
        assert wr.wrapped == CycSet.of(9, range(9))
        assert wr.truncated_sum_t == 9
        assert wr.mass_bound() == 16  # (1+0)*10*1 + 6

    def test_contract_far_point(self):
        S = IntSet.of(list(range(999)) + [10**6])
        wr = wrap(S, 10)
        assert len(wr.wrapped) >= 981
        # the far region falls outside the window
        assert wr.x + wr.n <= 10**6
        assert wr.truncated_sum_t <= wr.mass_bound()

    def test_minimal_size(self):
        wr = wrap(IntSet.of([0, 1, 2, 3, 4]), 2)
        assert len(wr.wrapped) >= 1
        assert wr.truncated_sum_t <= wr.mass_bound()

    def test_size_guard(self):
        with pytest.raises(ValueError):
            wrap(IntSet.of([0, 1, 2, 3]), 2)
        with pytest.raises(ValueError):
            wrap(IntSet.of([0, 1, 2]), 0)

    def test_deterministic(self):
        S = IntSet.of([0, 4, 7, 9, 13, 22, 23, 40, 41, 44])
        assert wrap(S, 2) == wrap(S, 2)

    def test_exhaustive_small(self):
        rep = wrap_contract_exhaustive(9)
        assert rep.ok and rep.instances > 500

    def test_random_contract(self):
        rep = wrap_contract_random(60, 200, seed=5)
        assert rep.ok


class TestFindSubgroup:
    def test_exact_even_coset(self):
        A = CycSet.of(8, [0, 2, 4, 6])
        res = find_subgroup(A, A, 1, Fraction(1, 4))
        assert res.H.residues == (0, 2, 4, 6)
        assert res.coset_a == res.coset_b == 0
        assert res.outside_a == res.outside_b == 0
        assert res.step == 2

    def test_index_three_subgroup(self):
        A = CycSet.of(12, [0, 3, 6, 9])
        res = find_subgroup(A, A, 1, Fraction(1, 4))
        assert res.H.residues == (0, 3, 6, 9)
        assert res.outside_a == 0

    def test_shifted_coset(self):
        A = CycSet.of(12, [1, 4, 7, 10])
        res = find_subgroup(A, A, 1, Fraction(1, 4))
        assert res.H.residues == (0, 3, 6, 9)
        assert res.coset_a == 1  # the coset containing A
        assert set(A) <= {(res.coset_a + h) % 12 for h in res.H}
        assert res.outside_a == 0

    def test_dense_boundary_instance(self):
        # 8 of 9 residues; the smallest admissible eta is exactly 1/8 and the
        # subgroup must come out as the whole group.
        A = CycSet.of(9, range(8))
        assert truncated_sum(A, A, 2) == 18 == (1 + Fraction(1, 8)) * 8 * 2
        res = find_subgroup(A, A, 2, Fraction(1, 8))
        assert res.H == CycSet.of(9, range(9))
        assert res.outside_a == res.outside_b == 0

    def test_hypothesis_failures_tagged(self):
        A = CycSet.of(8, [0, 2, 4, 6])
        with pytest.raises(HypothesisNotMet) as info:
            find_subgroup(A, A, 1, Fraction(1, 100))
        assert info.value.reason == "doubling-bound"
        with pytest.raises(HypothesisNotMet) as info:
            find_subgroup(A, A, 3, Fraction(1, 4))
        assert info.value.reason == "eta-range"

    def test_structural_errors(self):
        with pytest.raises(ValueError):
            find_subgroup(CycSet.of(8, [0, 2]), CycSet.of(8, [0, 2, 4]), 1, Fraction(1, 4))
        with pytest.raises(ValueError):
            find_subgroup(CycSet.of(8, [0]), CycSet.of(9, [0]), 1, Fraction(1, 4))


class TestRecoverProgression:
    def test_worked_far_point_instance(self):
        S = IntSet.of(list(range(999)) + [10**6])
        cover = recover_progression(S, 10)
        assert cover.exceptional.elements == (10**6,)
        assert cover.covered.elements == tuple(range(999))
        assert cover.progression.length <= cover.length_bound() <= 1436
        assert cover.delta == Fraction(1879, 10000)

    def test_exact_progression_comes_back_whole(self):
        S = IntSet.of(range(0, 1000, 5))
        cover = recover_progression(S, 5)
        assert cover.delta == 0
        assert cover.exceptional.elements == ()
        assert cover.progression == APDescriptor(0, 5, 200)

    def test_dense_random_contract(self):
        # 200 of [0, 220]: fine at t = 2; at t = 5 the slack 5t/N pushes the
        # hypothesis over 1/4 for typical draws and the gate must fire.
        rng = np.random.default_rng(7)
        els = np.sort(rng.choice(221, size=200, replace=False))
        S = IntSet.of(int(x) for x in els)
        cover = recover_progression(S, 2)
        assert cover.progression.length <= cover.length_bound()
        assert 2 * len(cover.exceptional) <= 5 * 2
        with pytest.raises(HypothesisNotMet):
            recover_progression(S, 5)

    def test_hypothesis_gate(self):
        with pytest.raises(HypothesisNotMet) as info:
            recover_progression(IntSet.of([0, 1, 10]), 1)
        assert info.value.reason == "doubling-bound"

    def test_deterministic(self):
        S = IntSet.of(list(range(0, 1800, 3)) + [1809, 1812])
        assert recover_progression(S, 12) == recover_progression(S, 12)

    def test_generator_and_sweep(self):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(3)))
        S, t = random_recovery_instance(rng)
        assert 200 <= len(S) <= 1003
        rep = recovery_contract_random(8, seed=2)
        assert rep.ok

    def test_cover_validation(self):
        with pytest.raises(ContractViolation):
            ProgressionCover(
                progression=APDescriptor(0, 1, 3),
                covered=IntSet.of([0, 1, 2]),
                exceptional=IntSet.of(range(100, 160)),  # way over 5t/2
                delta=Fraction(0),
                t=1,
            )
