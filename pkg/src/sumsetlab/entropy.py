"""Binary entropy and the binomial-coefficient sandwich / tail estimates.

Inequality checks compare exact big-integer binomials against ``2**(n*H(.))``
in log2 space, rounding the entropy side outward by an ``n * ulp`` margin so
floating error can neither fabricate nor mask a violation at these scales.
"""

from __future__ import annotations

import math

from .bounds import BoundCheck, SweepReport

__all__ = ["binary_entropy", "binom_sandwich", "binom_tail", "entropy_sweep"]

_LN2 = math.log(2)


def binary_entropy(t: float) -> float:
    """``H(t) = t*log2(1/t) + (1-t)*log2(1/(1-t))``, continuously 0 at the ends."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * (math.log1p(-t) / _LN2)


def _outward_margin(n: int, exponent: float) -> float:
    return n * math.ulp(max(1.0, abs(exponent)))


def binom_sandwich(n: int, k: int) -> BoundCheck:
    """``2^{nH(k/n)}/(n+1) <= C(n,k) <= 2^{nH(k/n)}`` with outward rounding."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    exponent = n * binary_entropy(k / n) if n else 0.0
    margin = _outward_margin(max(n, 1), exponent)
    log2_binom = math.log2(math.comb(n, k)) if n else 0.0
    upper_ok = log2_binom <= exponent + margin
    lower_ok = exponent - math.log2(n + 1) - margin <= log2_binom
    return BoundCheck(
        name="binom-sandwich",
        lhs=math.comb(n, k),
        rhs=2.0 ** min(exponent, 1023.0),
        relation="sandwich",
        holds=upper_ok and lower_ok,
        witness={"n": n, "k": k, "log2_binom": log2_binom, "exponent": exponent},
    )


def binom_tail(n: int, delta: float) -> BoundCheck:
    """``sum_{j <= floor(delta*n)} C(n,j) <= 2^{nH(delta)}`` with outward rounding."""
    if not 0.0 <= delta <= 0.5:
        raise ValueError(f"delta={delta} outside [0, 1/2]")
    cutoff = math.floor(delta * n)
    partial = sum(math.comb(n, j) for j in range(cutoff + 1))
    exponent = n * binary_entropy(delta)
    margin = _outward_margin(max(n, 1), exponent)
    holds = math.log2(partial) <= exponent + margin
    return BoundCheck(
        name="binom-tail",
        lhs=partial,
        rhs=2.0 ** min(exponent, 1023.0),
        relation="<=",
        holds=holds,
        witness={"n": n, "delta": delta, "cutoff": cutoff},
    )


def entropy_sweep(nmax: int, grid: int = 100) -> SweepReport:
    """Sandwich over all (n, k) and tail over a delta grid of step 1/grid."""
    report = SweepReport(name=f"entropy-n{nmax}", instances=0)
    for n in range(nmax + 1):
        for k in range(n + 1):
            report.instances += 1
            chk = binom_sandwich(n, k)
            if not chk.holds:
                report.violations.append(chk)
        # exact partial sums, reused across the grid
        partial = 0
        comb_row = [math.comb(n, j) for j in range(n + 1)]
        prefix = []
        for c in comb_row:
            partial += c
            prefix.append(partial)
        for g in range(grid // 2 + 1):
            delta = g / grid
            report.instances += 1
            cutoff = math.floor(delta * n)
            exponent = n * binary_entropy(delta)
            margin = _outward_margin(max(n, 1), exponent)
            lhs = prefix[min(cutoff, n)]
            if math.log2(lhs) > exponent + margin:
                report.violations.append((n, delta, lhs))
    return report
