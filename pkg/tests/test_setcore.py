import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sumsetlab.setcore import (
    ConvTable,
    CycSet,
    IntSet,
    autocorrelation,
    convolution,
    doubling_report,
    equality_misclassifications,
    integer_pollard_violations,
    is_arithmetic_progression,
    is_centrally_symmetric,
    negate,
    scalar_inequality_violations,
    sumset,
    symmetric_equality_misclassifications,
    triangle_inequality_violations,
    truncated_sum,
    truncation_monotonicity_violations,
)

small_sets = st.sets(st.integers(-50, 50), min_size=1, max_size=12)


def brute_conv(A, B):
    c = {}
    for a in A:
        for b in B:
            c[a + b] = c.get(a + b, 0) + 1
    return c


class TestSets:
    def test_intset_sorted_dedup(self):
        assert IntSet.of([3, 1, 2, 2]).elements == (1, 2, 3)

    def test_intset_rejects_unsorted(self):
        with pytest.raises(ValueError):
            IntSet((2, 1))

    def test_cycset_bounds(self):
        with pytest.raises(ValueError):
            CycSet(5, (0, 7))
        assert CycSet.of(5, [7, -1]).residues == (2, 4)

    def test_json_round_trip(self):
        s = IntSet.of([5, -2, 9])
        assert IntSet.from_json(s.to_json()) == s
        c = CycSet.of(12, [3, 7])
        assert CycSet.from_json(c.to_json()) == c

    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            sumset(IntSet.of([1]), CycSet.of(5, [1]))
        with pytest.raises(ValueError):
            sumset(CycSet.of(5, [1]), CycSet.of(7, [1]))


class TestSumset:
    def test_interval_doubling(self):
        assert sumset(IntSet.of([1, 2, 3]), IntSet.of([1, 2, 3])).elements == (2, 3, 4, 5, 6)

    def test_sparse_example(self):
        A = IntSet.of([0, 1, 3, 7])
        out = sumset(A, A)
        assert out.elements == (0, 1, 2, 3, 4, 6, 7, 8, 10, 14)
        assert len(out) == 10

    def test_identity_element(self):
        B = IntSet.of([4, 9, 11])
        assert sumset(IntSet.of([0]), B) == B

    def test_cyclic_reduction(self):
        out = sumset(CycSet.of(5, [3, 4]), CycSet.of(5, [3, 4]))
        assert out.residues == (1, 2, 3)

    def test_empty(self):
        assert sumset(IntSet(), IntSet.of([1, 2])).elements == ()


class TestConvolution:
    def test_hand_count(self):
        t = convolution(IntSet.of([0, 1, 2]), IntSet.of([0, 1, 2]))
        assert t.value(2) == 3

    def test_interval_values(self):
        t = convolution(IntSet.of(range(10)), IntSet.of(range(10)))
        assert t.value(9) == 10 and t.value(0) == 1 and t.value(18) == 1

    def test_singletons(self):
        t = convolution(IntSet.of([0]), IntSet.of([5]))
        assert t.items() == [(5, 1)]

    def test_empty_table(self):
        t = convolution(IntSet(), IntSet.of([1]))
        assert t.total() == 0 and t.items() == []

    @given(small_sets, small_sets)
    @settings(max_examples=60, deadline=None)
    def test_total_and_cap(self, a, b):
        A, B = IntSet.of(a), IntSet.of(b)
        t = convolution(A, B)
        assert t.total() == len(A) * len(B)
        assert t.max_count() <= min(len(A), len(B))
        assert {p: c for p, c in t.items()} == brute_conv(a, b)

    @given(small_sets)
    @settings(max_examples=40, deadline=None)
    def test_self_conv_symmetry(self, a):
        # pointwise symmetry about min+max holds exactly for centrally
        # symmetric sets (e.g. {0,1,3} breaks it); the support endpoints and
        # the autocorrelation are symmetric for every set.
        A = IntSet.of(a)
        t = convolution(A, A)
        center = A.min() + A.max()
        pts = [p for p, _ in t.items()]
        assert min(pts) == 2 * A.min() and max(pts) == 2 * A.max()
        if is_centrally_symmetric(A):
            for p, c in t.items():
                assert t.value(2 * center - p) == c
        ac = autocorrelation(A)
        for p, c in ac.items():
            assert ac.value(-p) == c

    def test_dense_sparse_agree(self):
        A = IntSet.of([0, 3, 500, 10**7])
        dense_limitless = convolution(A, A, dense_span_limit=1 << 30)
        sparse = convolution(A, A, dense_span_limit=1)
        assert dense_limitless.is_dense and not sparse.is_dense
        assert dense_limitless == sparse

    def test_big_integer_fallback(self):
        A = IntSet.of([0, 1, 2**80])
        t = convolution(A, A)
        assert t.total() == 9 and t.value(2**81) == 1 and t.value(2**80 + 1) == 2

    def test_cyclic_wraps(self):
        t = convolution(CycSet.of(4, [1, 3]), CycSet.of(4, [1, 3]))
        assert t.value(2) == 2 and t.value(0) == 2

    def test_autocorrelation_counts_overlaps(self):
        A = CycSet.of(8, [0, 2, 4, 6])
        ac = autocorrelation(A)
        assert all(ac.value(x) == 4 for x in (0, 2, 4, 6))
        assert all(ac.value(x) == 0 for x in (1, 3, 5, 7))
        assert negate(A).residues == (0, 2, 4, 6)


class TestTruncatedSum:
    def test_progression_minimum(self):
        S = IntSet.of(range(10))
        assert truncated_sum(S, S, 2) == 36 == 2 * (2 * 10 - 2)

    def test_threshold_one_is_sumset_size(self):
        A = IntSet.of([0, 1, 3, 7])
        assert truncated_sum(A, A, 1) == 10 == len(sumset(A, A))

    def test_singleton(self):
        S = IntSet.of([0])
        assert truncated_sum(S, S, 1) == 1

    @given(small_sets, small_sets, st.integers(1, 15))
    @settings(max_examples=60, deadline=None)
    def test_monotone_and_saturation(self, a, b, t):
        A, B = IntSet.of(a), IntSet.of(b)
        assert truncated_sum(A, B, t) <= truncated_sum(A, B, t + 1)
        m = min(len(A), len(B))
        assert truncated_sum(A, B, m) == truncated_sum(A, B, m + 5) == len(A) * len(B)

    @given(small_sets, small_sets, st.fractions(min_value=Fraction(1, 4), max_value=10),
           st.fractions(min_value=Fraction(1, 4), max_value=10))
    @settings(max_examples=60, deadline=None)
    def test_truncation_monotonicity_exact(self, a, b, t, dt):
        A, B = IntSet.of(a), IntSet.of(b)
        tp = t + dt
        table = convolution(A, B)
        assert table.truncated_mass(t) >= (t / tp) * table.truncated_mass(tp)

    @given(small_sets, small_sets)
    @settings(max_examples=40, deadline=None)
    def test_mass_floor_at_cap(self, a, b):
        A, B = IntSet.of(a), IntSet.of(b)
        m = min(len(A), len(B))
        for t in range(1, m + 1):
            assert truncated_sum(A, B, t) >= Fraction(t, m) * len(A) * len(B)

    def test_rational_threshold(self):
        A = IntSet.of([0, 1, 2])
        table = convolution(A, A)
        # counts 1,2,3,2,1 -> min with 3/2: 1 + 3/2 + 3/2 + 3/2 + 1
        assert table.truncated_mass(Fraction(3, 2)) == Fraction(13, 2)


class TestDoublingReport:
    def test_interval(self):
        rep = doubling_report(IntSet.of(range(10)), 1)
        assert rep.truncated == 19 and rep.delta == Fraction(-1, 10)

    def test_progression_with_far_point(self):
        rep = doubling_report(IntSet.of(list(range(999)) + [10**6]), 10)
        assert rep.truncated == 21879
        assert rep.delta == Fraction(1879, 10000)
        assert abs(rep.delta_float - 0.1879) < 1e-12

    def test_singleton(self):
        rep = doubling_report(IntSet.of([0]), 1)
        assert rep.truncated == 1 and rep.delta == -1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            doubling_report(IntSet(), 1)


class TestClassification:
    def test_progression_predicate(self):
        assert is_arithmetic_progression(IntSet.of([0, 2, 4, 6]))
        assert is_arithmetic_progression(IntSet.of([5]))
        assert is_arithmetic_progression(IntSet.of([1, 9]))
        assert not is_arithmetic_progression(IntSet.of([0, 1, 3]))

    def test_symmetry_predicate(self):
        assert is_centrally_symmetric(IntSet.of([0, 1, 3, 4]))
        assert not is_centrally_symmetric(IntSet.of([0, 1, 4]))

    def test_pollard_bound_exhaustive(self):
        assert integer_pollard_violations(9) == []

    def test_equality_iff_progression_below_top(self):
        assert equality_misclassifications(10, include_top_threshold=False) == []

    def test_top_threshold_characterizes_symmetry(self):
        assert symmetric_equality_misclassifications(10) == []

    def test_top_threshold_equality_without_progression(self):
        # symmetric non-progression: equality at t = |S| - 1
        S = IntSet.of([0, 1, 3, 4])
        assert truncated_sum(S, S, 3) == 3 * (2 * 4 - 3)
        assert not is_arithmetic_progression(S)

    def test_sampled_inequalities(self):
        assert scalar_inequality_violations(2000, seed=0) == []
        assert triangle_inequality_violations(500, seed=0) == []
        assert truncation_monotonicity_violations(300, seed=0) == []


class TestConvTableJson:
    def test_sorted_entries(self):
        t = convolution(IntSet.of([0, 5]), IntSet.of([0, 5]))
        assert t.to_json() == {"entries": [[0, 1], [5, 2], [10, 1]]}
