"""Recovery of arithmetic-progression structure from small popular doubling.

The pipeline has three stages, each an executable form of a constructive
existence argument:

1. ``wrap``: split S into left/middle/right blocks A, B, C with |A| = |C| = t,
   pick witnesses a in A and c in C whose aligned convolution mass dominates
   the block average, and project the window ``S & [a, a + (c-a))`` into
   Z/(c-a)Z.  Wrapping merges the two heavy translates of the middle block,
   roughly halving the truncated doubling mass.

2. ``find_subgroup``: inside a cyclic group, a set pair with truncated mass
   below ``(1+eta)Nt`` concentrates on a coset of the subgroup H of heavy
   autocorrelation shifts.  H is located by thresholding the autocorrelation
   at 2t, the coset by the peak of the convolution, and per-set shifts by
   maximizing overlap witnesses.

3. ``recover_progression``: run both stages with exact rational bookkeeping
   and pull the recovered coset back through the window, producing a
   progression in Z covering all but a bounded number of points of S.

Everything is deterministic: every argmax breaks ties toward the smallest
element, so identical inputs give identical witnesses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import APDescriptor
from .errors import ContractViolation, HypothesisNotMet
from .setcore import (
    CycSet,
    IntSet,
    autocorrelation,
    convolution,
    doubling_report,
    truncated_sum,
)

__all__ = [
    "WrapResult",
    "SubgroupResult",
    "ProgressionCover",
    "wrap",
    "find_subgroup",
    "recover_progression",
    "wrap_contract_exhaustive",
    "wrap_contract_random",
    "recovery_contract_random",
    "random_recovery_instance",
]

logger = logging.getLogger("sumsetlab.structure")


@dataclass(frozen=True)
class WrapResult:
    """Projection of a window of S into Z/nZ with its truncated mass.

    Guarantees, whenever the doubling hypothesis held with slack ``delta``:
    ``len(wrapped) >= N - 2t`` and
    ``truncated_sum_t <= (1 + 2*delta)*N*t + 6*t**2``.
    """

    n: int
    x: int
    wrapped: CycSet
    truncated_sum_t: int
    witness_a: int
    witness_c: int
    N: int
    t: int
    delta: Fraction

    def mass_bound(self) -> Fraction:
        return (1 + 2 * self.delta) * self.N * self.t + 6 * self.t * self.t


@dataclass(frozen=True)
class SubgroupResult:
    """Subgroup of heavy shifts plus per-set coset locations.

    ``H = dZ/nZ``; ``coset_a`` and ``coset_b`` are the smallest residues of
    the cosets nearly containing A and B respectively, and the outside counts
    obey ``outside_a + outside_b <= t``.
    """

    H: CycSet
    coset_a: int
    coset_b: int
    outside_a: int
    outside_b: int

    @property
    def step(self) -> int:
        n = self.H.modulus
        return n if len(self.H) == 1 else self.H.residues[1]


@dataclass(frozen=True)
class ProgressionCover:
    """A progression covering all but a bounded exceptional part of S."""

    progression: APDescriptor
    covered: IntSet
    exceptional: IntSet
    delta: Fraction
    t: int

    def __post_init__(self):
        N = len(self.covered) + len(self.exceptional)
        if self.progression.length > (1 + 2 * self.delta) * N + 6 * self.t:
            raise ContractViolation(
                f"progression length {self.progression.length} exceeds "
                f"(1+2d)N+6t = {float((1 + 2 * self.delta) * N + 6 * self.t)}"
            )
        if 2 * len(self.exceptional) > 5 * self.t:
            raise ContractViolation(
                f"{len(self.exceptional)} exceptional points exceed 5t/2 = {5 * self.t / 2}"
            )
        pset = self.progression.element_set()
        cov, exc = set(self.covered), set(self.exceptional)
        if cov & exc or not cov <= pset or exc & pset:
            raise ContractViolation("covered/exceptional do not partition S against P")

    def length_bound(self) -> Fraction:
        N = len(self.covered) + len(self.exceptional)
        return (1 + 2 * self.delta) * N + 6 * self.t

    def exceptional_bound(self) -> Fraction:
        return Fraction(5 * self.t, 2)


def _clamped_delta(S: IntSet, t: int) -> Fraction:
    """Doubling slack, clamped up to 0 (equality-case inputs stay meaningful)."""
    return max(doubling_report(S, t).delta, Fraction(0))


def wrap(S: IntSet, t: int) -> WrapResult:
    """Wrap S modulo the gap between two dominant near-end witnesses.

    Requires ``|S| > 2t``.  The returned window is ``[a, a + n)`` with
    ``n = c - a``; distinct window elements stay distinct mod n, so at most
    ``2t - 1`` points (the rest of the left and right blocks) are lost.
    """
    N = len(S)
    if t < 1:
        raise ValueError("t must be >= 1")
    if N <= 2 * t:
        raise ValueError(f"need |S| > 2t (got |S|={N}, t={t})")
    els = S.elements
    left, mid, right = els[:t], els[t : N - t], els[N - t :]
    A, B, C = IntSet(left), IntSet(mid), IntSet(right)
    fg = convolution(A, B)
    gh = convolution(B, C)
    a = min(left, key=lambda cand: (-sum(fg.value(cand + b) for b in mid), cand))
    c = min(right, key=lambda cand: (-sum(gh.value(b + cand) for b in mid), cand))
    n = c - a
    if n <= 0:
        raise ContractViolation("window endpoints collapsed; blocks must be ordered")
    wrapped = CycSet.of(n, (s % n for s in els if a <= s < a + n))
    T = truncated_sum(wrapped, wrapped, t)
    return WrapResult(
        n=n,
        x=a,
        wrapped=wrapped,
        truncated_sum_t=T,
        witness_a=a,
        witness_c=c,
        N=N,
        t=t,
        delta=_clamped_delta(S, t),
    )


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def find_subgroup(A: CycSet, B: CycSet, t, eta) -> SubgroupResult:
    """Locate the subgroup and cosets carrying nearly all of A and B.

    ``t`` and ``eta`` may be rational; the input must satisfy
    ``eta + t/N <= 1/2`` and ``truncated mass of 1_A*1_B <= (1+eta)Nt``.
    Failures of the hypothesis (including threshold sets that do not close
    into a subgroup, autocorrelation values in the forbidden middle range,
    or outside counts beyond t) raise :class:`HypothesisNotMet` with a
    distinct reason tag.
    """
    if A.modulus != B.modulus:
        raise ValueError("modulus mismatch")
    n = A.modulus
    N = len(A)
    if N == 0 or len(B) != N:
        raise ValueError("need |A| = |B| = N > 0")
    t, eta = _as_fraction(t), _as_fraction(eta)
    if t <= 0 or eta <= 0:
        raise ValueError("t and eta must be positive")
    if eta + t / N > Fraction(1, 2):
        raise HypothesisNotMet("eta-range", f"eta + t/N = {float(eta + t / N)} > 1/2")
    conv = convolution(A, B)
    mass = conv.truncated_mass(t)
    if mass > (1 + eta) * N * t:
        raise HypothesisNotMet(
            "doubling-bound",
            f"truncated mass {float(mass)} > (1+eta)Nt = {float((1 + eta) * N * t)}",
        )

    ac_a = autocorrelation(A)
    ac_b = ac_a if A == B else autocorrelation(B)
    H_els = sorted(x for x, cnt in ac_a.items() if cnt >= 2 * t)
    d = 0
    for h in H_els:
        d = math.gcd(d, h)
    d = math.gcd(d, n)
    if not H_els or len(H_els) != n // d or any(h % d for h in H_els):
        raise HypothesisNotMet("subgroup-closure", f"threshold set {H_els} is not d*Z/nZ")
    if len(H_els) > (1 + eta) * N:
        raise HypothesisNotMet(
            "subgroup-size", f"|H| = {len(H_els)} > (1+eta)N = {float((1 + eta) * N)}"
        )
    floor_autocorr = (1 - eta) * N
    for h in H_els:
        if ac_a.value(h) < floor_autocorr or ac_b.value(h) < floor_autocorr:
            raise HypothesisNotMet(
                "autocorrelation-floor",
                f"shift {h} in H has autocorrelation below (1-eta)N",
            )
    for x, cnt in ac_b.items():
        if cnt >= 2 * t and x % d:
            raise HypothesisNotMet(
                "autocorrelation-outside", f"shift {x} outside H is 2t-heavy for B"
            )

    x0 = min((x for x, _ in conv.items()), key=lambda x: (-conv.value(x), x))
    coset = frozenset((h + x0) % n for h in H_els)
    b_wit = _best_overlap_witness(A, B.residues, coset, n)
    a_wit = _best_overlap_witness(B, A.residues, coset, n)
    coset_a = frozenset((cc - b_wit) % n for cc in coset)
    coset_b = frozenset((cc - a_wit) % n for cc in coset)
    outside_a = sum(1 for r in A.residues if r not in coset_a)
    outside_b = sum(1 for r in B.residues if r not in coset_b)
    if outside_a + outside_b > t:
        raise HypothesisNotMet(
            "outside-count",
            f"outside counts {outside_a}+{outside_b} exceed t = {float(t)}",
        )
    return SubgroupResult(
        H=CycSet(n, tuple(int(h) for h in H_els)),
        coset_a=int(min(coset_a)),
        coset_b=int(min(coset_b)),
        outside_a=outside_a,
        outside_b=outside_b,
    )


def _best_overlap_witness(X: CycSet, shifts: tuple[int, ...], coset: frozenset[int], n: int) -> int:
    """Shift s (smallest on ties) maximizing ``|(X + s) & coset|``."""
    xs = np.asarray(X.residues, dtype=np.int64)
    best_s, best_o = shifts[0], -1
    if n <= (1 << 22):
        ind = np.zeros(n, dtype=bool)
        ind[list(coset)] = True
        for s in shifts:
            o = int(ind[(xs + s) % n].sum())
            if o > best_o:
                best_s, best_o = s, o
    else:
        for s in shifts:
            o = sum(1 for r in X.residues if (r + s) % n in coset)
            if o > best_o:
                best_s, best_o = s, o
    return best_s


def recover_progression(S: IntSet, t: int) -> ProgressionCover:
    """Cover all but at most 5t/2 points of S by one progression.

    Requires the clamped doubling slack to satisfy ``delta + 5t/N <= 1/4``;
    the recovered progression has length at most ``(1 + 2*delta)N + 6t``.
    After unwrapping the coset through the window, the progression is
    greedily extended (within the length bound) over adjacent members of S,
    so exact progressions come back untouched.
    """
    N = len(S)
    if N == 0:
        raise ValueError("set must be nonempty")
    if t < 1:
        raise ValueError("t must be >= 1")
    delta = _clamped_delta(S, t)
    if delta + Fraction(5 * t, N) > Fraction(1, 4):
        raise HypothesisNotMet(
            "doubling-bound",
            f"delta + 5t/N = {float(delta + Fraction(5 * t, N))} > 1/4",
        )
    wr = wrap(S, t)
    n, n_prime = wr.n, len(wr.wrapped)
    length_cap = (1 + 2 * delta) * N + 6 * t
    eta = (length_cap - n_prime) / n_prime
    sub = find_subgroup(wr.wrapped, wr.wrapped, Fraction(t), eta)
    if 2 * min(sub.outside_a, sub.outside_b) > t:
        logger.warning(
            "coset missed %d wrapped points, above the t/2 heuristic (t=%d)",
            min(sub.outside_a, sub.outside_b),
            t,
        )
    shift = sub.coset_a if sub.outside_a <= sub.outside_b else sub.coset_b
    d = sub.step
    start = wr.x + ((shift - wr.x) % d)
    length = n // d
    sset = set(S.elements)
    while start - d in sset and length + 1 <= length_cap:
        start -= d
        length += 1
    while start + length * d in sset and length + 1 <= length_cap:
        length += 1
    prog = APDescriptor(start=start, step=d, length=length)
    pset = prog.element_set()
    covered = IntSet.of(e for e in S.elements if e in pset)
    exceptional = IntSet.of(e for e in S.elements if e not in pset)
    return ProgressionCover(
        progression=prog, covered=covered, exceptional=exceptional, delta=delta, t=t
    )


# ---------------------------------------------------------------------------
# contract sweeps


def wrap_contract_exhaustive(nmax: int):
    """Both wrap guarantees over every S <= {0..nmax} and every valid t."""
    from .bounds import SweepReport

    report = SweepReport(name=f"wrap-exhaustive-n{nmax}", instances=0)
    for mask in range(1, 1 << (nmax + 1)):
        els = tuple(i for i in range(nmax + 1) if mask >> i & 1)
        N = len(els)
        if N < 3:
            continue
        S = IntSet(els)
        for t in range(1, (N - 1) // 2 + 1):
            report.instances += 1
            wr = wrap(S, t)
            if len(wr.wrapped) < N - 2 * t or wr.truncated_sum_t > wr.mass_bound():
                report.violations.append((els, t, wr))
    return report


def wrap_contract_random(count: int, max_size: int, seed: int = 0):
    """Wrap guarantees over random mixed-shape sets with |S| <= max_size."""
    from .bounds import SweepReport

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    report = SweepReport(name=f"wrap-random-{count}", instances=0)
    while report.instances < count:
        S = _random_mixed_set(rng, max_size)
        N = len(S)
        if N < 3:
            continue
        t = int(rng.integers(1, (N - 1) // 2 + 1))
        report.instances += 1
        wr = wrap(S, t)
        if len(wr.wrapped) < N - 2 * t or wr.truncated_sum_t > wr.mass_bound():
            report.violations.append((S.elements, t, wr))
    return report


def _random_mixed_set(rng: np.random.Generator, max_size: int) -> IntSet:
    kind = int(rng.integers(4))
    size = int(rng.integers(3, max_size + 1))
    if kind == 0:  # dense block
        span = size + int(rng.integers(0, size + 1))
        els = rng.choice(span, size=size, replace=False)
    elif kind == 1:  # dilated progression with deletions
        step = int(rng.integers(1, 30))
        els = np.arange(size) * step + int(rng.integers(-1000, 1000))
    elif kind == 2:  # progression plus far outliers
        step = int(rng.integers(1, 10))
        base = np.arange(size) * step
        far = base[-1] + (1 + rng.integers(1, 10, size=min(3, size // 3) or 1)) * 10**5
        els = np.concatenate([base, far])
    else:  # uniform sparse
        els = rng.choice(50 * max_size, size=size, replace=False)
    return IntSet.of(int(e) for e in els)


def random_recovery_instance(rng: np.random.Generator) -> tuple[IntSet, int]:
    """A dilated progression of length 200..1000 plus up to t/3 outliers.

    Three shapes: no outliers, one far outlier (each far point inflates the
    doubling mass by about 2N, i.e. delta by about 2/t, which together with
    ``delta + 5t/N <= 1/4`` needs N >= 700 or so), and one or two on-grid
    points just past a gap at either end (negligible mass).  The drawn t is
    re-checked against the exact hypothesis before the instance is accepted.
    """
    while True:
        n_ap = int(rng.integers(200, 1001))
        step = int(rng.integers(1, 21))
        start = int(rng.integers(-(10**5), 10**5))
        base = [start + i * step for i in range(n_ap)]
        shape = int(rng.integers(3))
        outliers: list[int] = []
        if shape == 1 and n_ap >= 700:
            t = int(rng.integers(10, min(25, n_ap // 40) + 1))
            offset = int(rng.integers(10**6, 10**7))
            outliers = [base[-1] + offset if rng.integers(2) else base[0] - offset]
        else:
            t = int(rng.integers(8, min(40, n_ap // 20) + 1))
            if shape == 2:
                for _ in range(int(rng.integers(1, min(3, t // 3) + 1))):
                    gap = int(rng.integers(2, 9))
                    if rng.integers(2):
                        outliers.append(base[-1] + gap * step + len(outliers) * step)
                    else:
                        outliers.append(base[0] - gap * step - len(outliers) * step)
        S = IntSet.of(base + outliers)
        if len(S) != n_ap + len(outliers):
            continue
        N = len(S)
        delta = _clamped_delta(S, t)
        if delta + Fraction(5 * t, N) <= Fraction(1, 4):
            return S, t


def recovery_contract_random(count: int, seed: int = 0):
    """Progression-cover guarantees over random valid recovery instances."""
    from .bounds import SweepReport

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    report = SweepReport(name=f"recovery-random-{count}", instances=0)
    while report.instances < count:
        S, t = random_recovery_instance(rng)
        report.instances += 1
        try:
            cover = recover_progression(S, t)
        except (HypothesisNotMet, ContractViolation) as exc:
            report.violations.append((S.elements[:8], t, repr(exc)))
            continue
        if cover.progression.length > cover.length_bound() or 2 * len(
            cover.exceptional
        ) > 5 * t:
            report.violations.append((S.elements[:8], t, cover))
    return report
