"""Checkers for the classical inequalities underpinning the structure results.

Three families live here: the truncated-convolution lower bound in prime-order
cyclic groups (with its full validity window over set pairs and thresholds),
the small-doubling covering condition ``|S+S| < 3|S|-3`` with its minimal
covering progression, and the interval/progression intersection statement used
to transfer structure between Z and Z/pZ.

Each single-instance checker returns a :class:`BoundCheck`; the exhaustive
sweeps are vectorized (all instance enumeration is embarrassingly parallel
and exact over machine integers) and return a :class:`SweepReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import ContractViolation, HypothesisNotMet
from .setcore import IntSet, CycSet, is_arithmetic_progression, sumset, truncated_sum

__all__ = [
    "BoundCheck",
    "APDescriptor",
    "FreimanCover",
    "SweepReport",
    "is_prime",
    "primes_up_to",
    "pollard_check",
    "freiman_3k3_check",
    "minimal_covering_progression",
    "ap_intersect",
    "pollard_exhaustive",
    "pollard_random",
    "ap_intersection_exhaustive",
    "freiman_exhaustive",
]


@dataclass(frozen=True)
class BoundCheck:
    """Uniform report for a single inequality instance."""

    name: str
    lhs: int | Fraction | float
    rhs: int | Fraction | float
    holds: bool
    relation: str = ">="
    witness: Any = None

    def to_json(self) -> dict:
        lhs = self.lhs if not isinstance(self.lhs, Fraction) else str(self.lhs)
        rhs = self.rhs if not isinstance(self.rhs, Fraction) else str(self.rhs)
        out = {"name": self.name, "lhs": lhs, "rhs": rhs,
               "relation": self.relation, "holds": self.holds}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class APDescriptor:
    """Arithmetic progression ``{start, start+step, ..., start+(length-1)*step}``.

    ``modulus`` is None for progressions in Z.  Singletons are progressions
    with any step; for longer modular progressions the step must generate
    ``length`` distinct residues.
    """

    start: int
    step: int
    length: int
    modulus: int | None = None

    def __post_init__(self):
        for field_name in ("start", "step", "length"):
            object.__setattr__(self, field_name, int(getattr(self, field_name)))
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.modulus is not None:
            n = self.modulus
            if n < 1:
                raise ValueError("modulus must be >= 1")
            object.__setattr__(self, "start", self.start % n)
            object.__setattr__(self, "step", self.step % n)
            if self.length > 1:
                if self.step == 0:
                    raise ValueError("step must be nonzero mod n for length > 1")
                if self.length > n // math.gcd(self.step, n):
                    raise ValueError("progression elements are not pairwise distinct")
        elif self.length > 1 and self.step == 0:
            raise ValueError("step must be nonzero for length > 1")

    def elements(self) -> tuple[int, ...]:
        if self.modulus is None:
            return tuple(self.start + i * self.step for i in range(self.length))
        return tuple((self.start + i * self.step) % self.modulus for i in range(self.length))

    def element_set(self) -> frozenset[int]:
        return frozenset(self.elements())

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "step": self.step,
            "length": self.length,
            "ambient": "Z" if self.modulus is None else self.modulus,
        }


@dataclass(frozen=True)
class FreimanCover:
    check: BoundCheck
    progression: APDescriptor


@dataclass
class SweepReport:
    """Outcome of an exhaustive or randomized instance sweep."""

    name: str
    instances: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "violations": len(self.violations),
            "examples": [repr(v) for v in self.violations[:5]],
        }


def is_prime(n: int) -> bool:
    """Deterministic trial division; moduli here are desk-scale."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_up_to(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if is_prime(p)]


def pollard_check(A: CycSet, B: CycSet, t: int) -> BoundCheck:
    """Truncated popular-sum mass against ``t(|A|+|B|-t)`` in Z/pZ.

    Valid for prime p and ``max(0, |A|+|B|-p) <= t <= min(|A|, |B|)``;
    ``holds`` is guaranteed true on valid inputs.
    """
    if A.modulus != B.modulus:
        raise ValueError("modulus mismatch")
    p = A.modulus
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    lo, hi = max(0, len(A) + len(B) - p), min(len(A), len(B))
    if not lo <= t <= hi:
        raise ValueError(f"t={t} outside the valid window [{lo}, {hi}]")
    lhs = truncated_sum(A, B, t) if t >= 1 else 0
    rhs = t * (len(A) + len(B) - t)
    return BoundCheck(
        name="pollard",
        lhs=lhs,
        rhs=rhs,
        holds=lhs >= rhs,
        witness={"p": p, "A": list(A.residues), "B": list(B.residues), "t": t},
    )


def minimal_covering_progression(S: IntSet) -> APDescriptor:
    """Shortest progression in Z containing S (step = gcd of the gaps)."""
    e = S.elements
    if len(e) == 0:
        raise ValueError("set must be nonempty")
    if len(e) == 1:
        return APDescriptor(start=e[0], step=1, length=1)
    g = 0
    for i in range(len(e) - 1):
        g = math.gcd(g, e[i + 1] - e[i])
    return APDescriptor(start=e[0], step=g, length=(e[-1] - e[0]) // g + 1)


def freiman_3k3_check(S: IntSet) -> FreimanCover:
    """Covering progression for sets with doubling below ``3|S| - 3``.

    Raises :class:`HypothesisNotMet` when ``|S+S| >= 3|S| - 3``; otherwise
    returns the minimal covering progression together with the check that its
    length is at most ``|S+S| - |S| + 1``.
    """
    N = len(S)
    if N < 2:
        raise ValueError("set must have at least 2 elements")
    m = len(sumset(S, S))
    if m >= 3 * N - 3:
        raise HypothesisNotMet(
            "doubling-too-large",
            f"|S+S| = {m} >= 3|S|-3 = {3 * N - 3}",
            payload={"sumset_size": m},
        )
    P = minimal_covering_progression(S)
    bound = m - N + 1
    return FreimanCover(
        check=BoundCheck(
            name="freiman-3k3",
            lhs=P.length,
            rhs=bound,
            relation="<=",
            holds=P.length <= bound,
            witness={"sumset_size": m, "N": N},
        ),
        progression=P,
    )


def _normalize_mod_ap(start: int, step: int, length: int, p: int) -> APDescriptor:
    """Reduce the step to (0, p/2] by reversing the progression if needed."""
    step %= p
    if length > 1 and step > p // 2:
        start = (start + (length - 1) * step) % p
        step = p - step
    return APDescriptor(start=start % p, step=step if length > 1 else step or 1,
                        length=length, modulus=p)


def ap_intersect(P: APDescriptor, Q: APDescriptor) -> APDescriptor:
    """Intersection of two mod-p progressions, as a progression with Q's step.

    Requires ``|P| <= p/4`` and ``|P & Q| >= |Q|/2 + 1`` (the real-valued
    reading of the threshold); under those conditions the intersection is a
    contiguous run of Q's enumeration and is returned with Q's common
    difference, step sign normalized to (0, p/2].  When the size conditions
    fail, raises :class:`HypothesisNotMet` carrying the plain intersection.
    """
    if P.modulus is None or Q.modulus is None or P.modulus != Q.modulus:
        raise ValueError("progressions must share a modulus")
    p = P.modulus
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    pset = P.element_set()
    qels = Q.elements()
    inter = sorted(pset.intersection(qels))
    if 4 * P.length > p or 2 * len(inter) < Q.length + 2:
        raise HypothesisNotMet(
            "size-window",
            f"|P|={P.length}, |Q|={Q.length}, |P&Q|={len(inter)} outside the window",
            payload={"intersection": inter},
        )
    hits = [i for i, q in enumerate(qels) if q in pset]
    if hits != list(range(hits[0], hits[-1] + 1)):
        raise ContractViolation(
            f"intersection is not contiguous in Q's enumeration: P={P}, Q={Q}"
        )
    return _normalize_mod_ap(qels[hits[0]], Q.step, len(hits), p)


# ---------------------------------------------------------------------------
# exhaustive sweeps


def pollard_exhaustive(p: int) -> SweepReport:
    """All ``(A, B, t)`` with A, B <= Z/pZ and t in the valid window.

    Exact integer arithmetic throughout: for a fixed A, representation counts
    against every B at once are accumulated by cyclically shifting the
    all-subsets indicator matrix.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    nmask = 1 << p
    masks = np.arange(nmask, dtype=np.uint32)
    member = ((masks[:, None] >> np.arange(p)[None, :]) & 1).astype(np.int16)
    sizes = member.sum(axis=1).astype(np.int64)
    ts = np.arange(p + 1, dtype=np.int64)
    report = SweepReport(name=f"pollard-exhaustive-p{p}", instances=0)
    for amask in range(nmask):
        A = [x for x in range(p) if amask >> x & 1]
        kA = len(A)
        counts = np.zeros((nmask, p), dtype=np.int16)
        for a in A:
            counts += np.roll(member, a, axis=1)
        smin = np.minimum(counts[:, :, None], ts[None, None, :]).sum(axis=1)
        rhs = ts[None, :] * (kA + sizes[:, None] - ts[None, :])
        valid = (ts[None, :] >= np.maximum(0, kA + sizes - p)[:, None]) & (
            ts[None, :] <= np.minimum(kA, sizes)[:, None]
        )
        report.instances += int(valid.sum())
        bad = valid & (smin < rhs)
        if bad.any():
            for bmask, t in zip(*np.nonzero(bad)):
                report.violations.append((amask, int(bmask), int(t)))
    return report


def pollard_random(pmax: int, count: int, seed: int = 0) -> SweepReport:
    """Random valid instances with prime modulus <= pmax, via :func:`pollard_check`."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    primes = [p for p in primes_up_to(pmax) if p >= 3]
    report = SweepReport(name=f"pollard-random-pmax{pmax}", instances=0)
    while report.instances < count:
        p = primes[int(rng.integers(len(primes)))]
        A = CycSet.of(p, rng.choice(p, size=int(rng.integers(1, p + 1)), replace=False))
        B = CycSet.of(p, rng.choice(p, size=int(rng.integers(1, p + 1)), replace=False))
        lo, hi = max(0, len(A) + len(B) - p), min(len(A), len(B))
        if hi < max(lo, 1):
            continue
        t = int(rng.integers(max(lo, 1), hi + 1))
        report.instances += 1
        chk = pollard_check(A, B, t)
        if not chk.holds:
            report.violations.append(chk)
    return report


def _ap_indicator_sets(p: int, max_length: int) -> list[int]:
    """Distinct progression subsets of Z/pZ with length <= max_length, as bitmasks."""
    seen: set[int] = set()
    for start in range(p):
        seen.add(1 << start)
    half = p // 2
    for step in range(1, half + 1):
        for start in range(p):
            mask = 1 << start
            x = start
            for _ in range(1, max_length):
                x = (x + step) % p
                mask |= 1 << x
                seen.add(mask)
    return sorted(seen)


def ap_intersection_exhaustive(pmax: int) -> SweepReport:
    """Every progression pair (P, Q) meeting the intersection window, p <= pmax.

    Dilation by the inverse of Q's step is a bijection of Z/pZ carrying
    progressions to progressions, preserving membership and Q's enumeration
    order; it reduces every pair to one where Q is an interval.  The sweep
    therefore enumerates all (P, interval-start, interval-length) triples,
    which covers all original pairs exactly.  For each triple meeting
    ``|P| <= p/4`` and ``|P & Q| >= |Q|/2 + 1`` it checks that the hits of P
    along Q's enumeration form one contiguous run (equivalently: the
    intersection is a progression with Q's common difference).
    """
    report = SweepReport(name=f"ap-intersection-pmax{pmax}", instances=0)
    for p in primes_up_to(pmax):
        max_len = p // 4
        if max_len < 1:
            continue
        idx = (np.arange(p)[:, None] + np.arange(p)[None, :]) % p
        ms = np.arange(1, p + 1, dtype=np.int64)
        for mask in _ap_indicator_sets(p, max_len):
            v = np.zeros(p, dtype=np.int8)
            for i in range(p):
                if mask >> i & 1:
                    v[i] = 1
            hits = v[idx]                       # hits[s, i] = [s + i in P]
            pops = hits.cumsum(axis=1)          # popcount of first m entries
            starts = hits.copy()
            starts[:, 1:] &= 1 - hits[:, :-1]   # run-start markers
            runs = starts.cumsum(axis=1)
            qualifying = 2 * pops >= ms[None, :] + 2
            report.instances += int(qualifying.sum())
            bad = qualifying & (runs != 1)
            if bad.any():
                for s, j in zip(*np.nonzero(bad)):
                    report.violations.append((p, mask, int(s), int(j + 1)))
    return report


def freiman_exhaustive(nmax: int) -> SweepReport:
    """All S <= {0..nmax} meeting the small-doubling hypothesis, via the real checker."""
    report = SweepReport(name=f"freiman-exhaustive-n{nmax}", instances=0)
    for mask in range(1, 1 << (nmax + 1)):
        if mask.bit_count() < 2:
            continue
        ss = 0
        m = mask
        while m:
            a = (m & -m).bit_length() - 1
            ss |= mask << a
            m &= m - 1
        if ss.bit_count() >= 3 * mask.bit_count() - 3:
            continue
        report.instances += 1
        S = IntSet.of(i for i in range(nmax + 1) if mask >> i & 1)
        result = freiman_3k3_check(S)
        if not result.check.holds or not set(S) <= set(result.progression.elements()):
            report.violations.append((tuple(S), result))
    return report
