"""Exact arithmetic on finite integer sets and cyclic-group subsets.

The central quantity everything else builds on is the indicator convolution
``1_A * 1_B(x)`` = number of ordered pairs ``(a, b)`` with ``a + b = x``, and
its truncation ``sum_x min(1_A*1_B(x), t)``, the averaged count of t-popular
sums.  All functionals return exact integers (or exact rationals when a
rational threshold is used); doubling slack is exposed as a
``fractions.Fraction`` so that equality cases are detected without rounding.

Convolution tables are stored as a dense counting array when the output span
is moderate and as a point->count map otherwise; sets with a single far-away
element make spans huge while the support stays small, so both paths matter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

import numpy as np

__all__ = [
    "IntSet",
    "CycSet",
    "ConvTable",
    "DoublingReport",
    "DENSE_SPAN_LIMIT",
    "sumset",
    "convolution",
    "negate",
    "autocorrelation",
    "truncated_sum",
    "doubling_report",
    "is_arithmetic_progression",
    "is_centrally_symmetric",
    "integer_pollard_violations",
    "equality_misclassifications",
    "symmetric_equality_misclassifications",
    "scalar_inequality_violations",
    "triangle_inequality_violations",
    "truncation_monotonicity_violations",
]

#: Spans up to this many cells use a dense counting array; larger spans fall
#: back to an associative map keyed by sum value.
DENSE_SPAN_LIMIT = 1 << 20

# numpy pair-enumeration is only safe while sums/differences fit in int64.
_NP_SAFE = 1 << 62


@dataclass(frozen=True)
class IntSet:
    """A finite set of integers, kept as a strictly increasing tuple."""

    elements: tuple[int, ...] = ()

    def __post_init__(self):
        els = tuple(int(e) for e in self.elements)
        if any(els[i] >= els[i + 1] for i in range(len(els) - 1)):
            raise ValueError("elements must be strictly increasing")
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, iterable: Iterable[int]) -> "IntSet":
        """Build from any iterable, sorting and discarding duplicates."""
        return cls(tuple(sorted(set(int(e) for e in iterable))))

    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in set(self.elements)

    def min(self) -> int:
        return self.elements[0]

    def max(self) -> int:
        return self.elements[-1]

    def to_json(self) -> list[int]:
        return list(self.elements)

    @classmethod
    def from_json(cls, data) -> "IntSet":
        if not isinstance(data, list) or not all(isinstance(v, int) for v in data):
            raise ValueError("integer set JSON must be an array of integers")
        return cls.of(data)


@dataclass(frozen=True)
class CycSet:
    """A subset of Z/nZ: modulus plus strictly increasing residues in [0, n)."""

    modulus: int
    residues: tuple[int, ...] = ()

    def __post_init__(self):
        n = int(self.modulus)
        if n < 1:
            raise ValueError("modulus must be >= 1")
        res = tuple(int(r) for r in self.residues)
        if any(not 0 <= r < n for r in res):
            raise ValueError("residues must lie in [0, modulus)")
        if any(res[i] >= res[i + 1] for i in range(len(res) - 1)):
            raise ValueError("residues must be strictly increasing")
        object.__setattr__(self, "modulus", n)
        object.__setattr__(self, "residues", res)

    @classmethod
    def of(cls, modulus: int, iterable: Iterable[int]) -> "CycSet":
        """Build from any iterable of integers, reduced mod ``modulus``."""
        return cls(modulus, tuple(sorted(set(int(e) % modulus for e in iterable))))

    def size(self) -> int:
        return len(self.residues)

    def __len__(self) -> int:
        return len(self.residues)

    def __iter__(self) -> Iterator[int]:
        return iter(self.residues)

    def __contains__(self, x: int) -> bool:
        return x % self.modulus in set(self.residues)

    def to_json(self) -> dict:
        return {"mod": self.modulus, "residues": list(self.residues)}

    @classmethod
    def from_json(cls, data) -> "CycSet":
        if (
            not isinstance(data, dict)
            or not isinstance(data.get("mod"), int)
            or not isinstance(data.get("residues"), list)
        ):
            raise ValueError('cyclic set JSON must look like {"mod": n, "residues": [...]}')
        return cls.of(data["mod"], data["residues"])


AnySet = Union[IntSet, CycSet]


def _check_same_kind(A: AnySet, B: AnySet) -> int | None:
    """Return the shared modulus (None for integer sets) or raise."""
    if isinstance(A, IntSet) and isinstance(B, IntSet):
        return None
    if isinstance(A, CycSet) and isinstance(B, CycSet):
        if A.modulus != B.modulus:
            raise ValueError(f"modulus mismatch: {A.modulus} != {B.modulus}")
        return A.modulus
    raise ValueError("operands must both be IntSet or both be CycSet")


class ConvTable:
    """Counts of ordered-pair representations ``a + b = x``.

    ``modulus`` is None for integer-set convolutions.  Only nonzero counts are
    reported by :meth:`items`.
    """

    def __init__(self, points: np.ndarray | list, counts: np.ndarray | list, *,
                 modulus: int | None = None, dense_span_limit: int = DENSE_SPAN_LIMIT):
        self.modulus = modulus
        points = list(points)
        counts = list(counts)
        self._dense: np.ndarray | None = None
        self._lo = 0
        self._map: dict[int, int] | None = None
        if points:
            lo, hi = int(min(points)), int(max(points))
            span = hi - lo + 1
        else:
            lo, span = 0, 0
        if 0 < span <= dense_span_limit and abs(lo) < _NP_SAFE and abs(lo + span) < _NP_SAFE:
            arr = np.zeros(span, dtype=np.int64)
            arr[np.asarray(points, dtype=np.int64) - lo] = np.asarray(counts, dtype=np.int64)
            self._dense = arr
            self._lo = lo
        else:
            self._map = {int(p): int(c) for p, c in zip(points, counts)}

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def value(self, x: int) -> int:
        if self.modulus is not None:
            x %= self.modulus
        if self._dense is not None:
            i = x - self._lo
            if 0 <= i < len(self._dense):
                return int(self._dense[i])
            return 0
        return self._map.get(x, 0)

    def items(self) -> list[tuple[int, int]]:
        """(point, count) pairs with nonzero count, sorted by point."""
        if self._dense is not None:
            idx = np.flatnonzero(self._dense)
            return [(int(i) + self._lo, int(self._dense[i])) for i in idx]
        return sorted(self._map.items())

    def total(self) -> int:
        if self._dense is not None:
            return int(self._dense.sum())
        return sum(self._map.values())

    def max_count(self) -> int:
        if self._dense is not None:
            return int(self._dense.max()) if len(self._dense) else 0
        return max(self._map.values(), default=0)

    def support_size(self) -> int:
        if self._dense is not None:
            return int(np.count_nonzero(self._dense))
        return len(self._map)

    def truncated_mass(self, t: int | Fraction) -> int | Fraction:
        """``sum_x min(count(x), t)`` exactly; Fraction thresholds allowed."""
        if isinstance(t, int):
            if t < 0:
                raise ValueError("threshold must be nonnegative")
            if self._dense is not None:
                return int(np.minimum(self._dense, t).sum())
            return sum(min(c, t) for c in self._map.values())
        t = Fraction(t)
        p, q = t.numerator, t.denominator
        if p < 0:
            raise ValueError("threshold must be nonnegative")
        if self._dense is not None and int(self._dense.max(initial=0)) * q < _NP_SAFE:
            below = self._dense[self._dense * q < p]
            n_at_or_above = len(self._dense[self._dense > 0]) - len(below[below > 0])
            small = int(below.sum())
        else:
            small = 0
            n_at_or_above = 0
            for c in self._counts_iter():
                if c * q < p:
                    small += c
                else:
                    n_at_or_above += 1
        return small + n_at_or_above * t

    def _counts_iter(self):
        if self._dense is not None:
            for c in self._dense:
                if c:
                    yield int(c)
        else:
            yield from self._map.values()

    def to_json(self) -> dict:
        return {"entries": [[p, c] for p, c in self.items()]}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConvTable)
            and self.modulus == other.modulus
            and self.items() == other.items()
        )


def _pair_values(A: AnySet, B: AnySet, op: str) -> tuple[np.ndarray, np.ndarray]:
    """All pairwise sums (or differences) with multiplicity counts."""
    mod = _check_same_kind(A, B)
    av = A.elements if isinstance(A, IntSet) else A.residues
    bv = B.elements if isinstance(B, IntSet) else B.residues
    if not av or not bv:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if max(abs(av[0]), abs(av[-1]), abs(bv[0]), abs(bv[-1])) < _NP_SAFE // 2:
        a = np.asarray(av, dtype=np.int64)
        b = np.asarray(bv, dtype=np.int64)
        sums = (a[:, None] + b[None, :] if op == "+" else a[:, None] - b[None, :]).ravel()
        if mod is not None:
            sums %= mod
        return np.unique(sums, return_counts=True)
    # big-integer fallback
    table: dict[int, int] = {}
    for x in av:
        for y in bv:
            s = x + y if op == "+" else x - y
            if mod is not None:
                s %= mod
            table[s] = table.get(s, 0) + 1
    pts = sorted(table)
    return np.array(pts, dtype=object), np.array([table[p] for p in pts], dtype=object)


def sumset(A: AnySet, B: AnySet) -> AnySet:
    """``{a + b : a in A, b in B}`` (reduced mod n for cyclic sets)."""
    mod = _check_same_kind(A, B)
    pts, _ = _pair_values(A, B, "+")
    if mod is None:
        return IntSet(tuple(int(p) for p in pts))
    return CycSet(mod, tuple(int(p) for p in pts))


def convolution(A: AnySet, B: AnySet, *, dense_span_limit: int = DENSE_SPAN_LIMIT) -> ConvTable:
    """Table of ordered-pair representation counts of ``1_A * 1_B``."""
    mod = _check_same_kind(A, B)
    pts, cnts = _pair_values(A, B, "+")
    return ConvTable(pts, cnts, modulus=mod, dense_span_limit=dense_span_limit)


def negate(A: AnySet) -> AnySet:
    """The reflected set ``-A`` (reduced mod n for cyclic sets)."""
    if isinstance(A, IntSet):
        return IntSet(tuple(-e for e in reversed(A.elements)))
    return CycSet.of(A.modulus, ((-r) % A.modulus for r in A.residues))


def autocorrelation(A: AnySet, *, dense_span_limit: int = DENSE_SPAN_LIMIT) -> ConvTable:
    """``1_A * 1_{-A}(x) = |A intersect (A + x)|``, large exactly on near-periods."""
    mod = A.modulus if isinstance(A, CycSet) else None
    pts, cnts = _pair_values(A, A, "-")
    return ConvTable(pts, cnts, modulus=mod, dense_span_limit=dense_span_limit)


def truncated_sum(A: AnySet, B: AnySet, t: int | Fraction) -> int | Fraction:
    """``sum_x min(1_A*1_B(x), t)``; integer thresholds give integers."""
    if isinstance(t, int) and t < 1:
        raise ValueError("t must be >= 1")
    if isinstance(t, Fraction) and t <= 0:
        raise ValueError("t must be positive")
    return convolution(A, B).truncated_mass(t)


@dataclass(frozen=True)
class DoublingReport:
    """Summary of the popular-doubling functional of a set against itself.

    ``delta`` is the exact slack in ``truncated = (2 + delta) * N * t``; it is
    negative for sets beating the arithmetic-progression minimum at this t
    (only possible through the t = N boundary effects), zero exactly on the
    minimum, and grows with unstructured sets.
    """

    N: int
    t: int
    truncated: int
    delta: Fraction

    @property
    def delta_float(self) -> float:
        return float(self.delta)


def doubling_report(S: IntSet, t: int) -> DoublingReport:
    if len(S) == 0:
        raise ValueError("set must be nonempty")
    if t < 1:
        raise ValueError("t must be >= 1")
    T = truncated_sum(S, S, t)
    delta = Fraction(T, len(S) * t) - 2
    return DoublingReport(N=len(S), t=t, truncated=T, delta=delta)


def is_arithmetic_progression(S: IntSet) -> bool:
    """Equal consecutive gaps; sets of size <= 2 count as progressions."""
    e = S.elements
    if len(e) <= 2:
        return True
    d = e[1] - e[0]
    return all(e[i + 1] - e[i] == d for i in range(len(e) - 1))


def is_centrally_symmetric(S: IntSet) -> bool:
    """True when ``S = (min + max) - S``."""
    e = S.elements
    if not e:
        return True
    tot = e[0] + e[-1]
    es = set(e)
    return all(tot - x in es for x in e)


def _subsets_of_range(n: int):
    for mask in range(1, 1 << n):
        yield [i for i in range(n) if mask >> i & 1]


def integer_pollard_violations(n: int) -> list[tuple[tuple[int, ...], int]]:
    """Exhaustively check ``truncated_sum(S,S,t) >= t(2|S|-t)`` over S in [0,n).

    Returns the (S, t) pairs violating the bound for 1 <= t <= |S|; the list
    is expected to be empty.
    """
    bad = []
    for els in _subsets_of_range(n):
        N = len(els)
        counts = _small_self_conv_counts(els)
        for t in range(1, N + 1):
            if sum(min(c, t) for c in counts) < t * (2 * N - t):
                bad.append((tuple(els), t))
    return bad


def _small_self_conv_counts(els: list[int]) -> list[int]:
    c: dict[int, int] = {}
    for a in els:
        for b in els:
            c[a + b] = c.get(a + b, 0) + 1
    return list(c.values())


def equality_misclassifications(
    n: int, *, include_top_threshold: bool = True
) -> list[tuple[tuple[int, ...], int, bool, bool]]:
    """Exhaustive equality-vs-progression classification over ``S in [0, n)``.

    For each S with |S| >= 2 and each threshold t (1 <= t < |S|, or
    1 <= t <= |S|-2 when ``include_top_threshold`` is False), compares
    "truncated mass equals t(2|S|-t)" against "S is an arithmetic
    progression".  Returns the disagreeing ``(S, t, equal, is_ap)`` tuples.

    With the top threshold t = |S|-1 included, disagreements exist: equality
    there characterizes the centrally symmetric sets, a strictly larger class
    than progressions (see :func:`symmetric_equality_misclassifications`).
    Excluding it, the classification is exact.
    """
    bad = []
    for els in _subsets_of_range(n):
        N = len(els)
        if N < 2:
            continue
        ap = is_arithmetic_progression(IntSet(tuple(els)))
        counts = _small_self_conv_counts(els)
        top = N if include_top_threshold else N - 1
        for t in range(1, top):
            equal = sum(min(c, t) for c in counts) == t * (2 * N - t)
            if equal != ap:
                bad.append((tuple(els), t, equal, ap))
    return bad


def scalar_inequality_violations(count: int, seed: int = 0) -> list[tuple[float, float]]:
    """Sample ``s^2 >= t(2s - min(2s, t))`` over real s in [-10,10], t in (0,10]."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    bad = []
    for _ in range(count):
        s = float(rng.uniform(-10, 10))
        t = float(rng.uniform(0, 10)) or 1e-9
        if s * s < t * (2 * s - min(2 * s, t)) - 1e-12:
            bad.append((s, t))
    return bad


def triangle_inequality_violations(count: int, seed: int = 0) -> list[tuple]:
    """``|U & (V-v)| + |U & (W-w)| <= |U| + |V & (W-w+v)|`` over random data."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    bad = []
    for _ in range(count):
        U = set(int(x) for x in rng.integers(-20, 20, size=rng.integers(1, 12)))
        V = set(int(x) for x in rng.integers(-20, 20, size=rng.integers(1, 12)))
        W = set(int(x) for x in rng.integers(-20, 20, size=rng.integers(1, 12)))
        v, w = int(rng.integers(-10, 10)), int(rng.integers(-10, 10))
        lhs = len(U & {x - v for x in V}) + len(U & {x - w for x in W})
        rhs = len(U) + len(V & {x - w + v for x in W})
        if lhs > rhs:
            bad.append((sorted(U), sorted(V), sorted(W), v, w))
    return bad


def truncation_monotonicity_violations(count: int, seed: int = 0) -> list[tuple]:
    """``T(t) >= (t/t') T(t')`` for 0 < t < t', exact rational arithmetic."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    bad = []
    for _ in range(count):
        A = IntSet.of(int(x) for x in rng.integers(0, 60, size=rng.integers(1, 15)))
        B = IntSet.of(int(x) for x in rng.integers(0, 60, size=rng.integers(1, 15)))
        table = convolution(A, B)
        t = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 5)))
        tp = t + Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 5)))
        if table.truncated_mass(t) < (t / tp) * table.truncated_mass(tp):
            bad.append((A.elements, B.elements, t, tp))
    return bad


def symmetric_equality_misclassifications(n: int) -> list[tuple[tuple[int, ...], bool, bool]]:
    """At the top threshold t = |S|-1, equality holds iff S is centrally symmetric.

    Returns the (S, equal, symmetric) disagreements (expected empty).
    """
    bad = []
    for els in _subsets_of_range(n):
        N = len(els)
        if N < 2:
            continue
        t = N - 1
        counts = _small_self_conv_counts(els)
        equal = sum(min(c, t) for c in counts) == t * (2 * N - t)
        sym = is_centrally_symmetric(IntSet(tuple(els)))
        if equal != sym:
            bad.append((tuple(els), equal, sym))
    return bad
