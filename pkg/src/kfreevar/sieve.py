"""Segmented k-free sieve, per-class counts, and lcm-pair counting sums.

A number is k-free when no prime k-th power divides it.  Segments are
independent: marking multiples of p^k in [lo, hi) needs only p <= (hi-1)^(1/k),
so concatenating segments of any sizes gives identical bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .arith import iroot, primes_up_to

DEFAULT_SEGMENT_BUDGET = 1 << 22
MAX_SIEVE_HI = 10**12


@dataclass
class SieveSegment:
    """k-free indicator bits over [lo, hi): bits[i] set iff lo+i is k-free."""

    k: int
    lo: int
    hi: int
    bits: np.ndarray

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def values(self) -> np.ndarray:
        """The k-free integers inside [lo, hi)."""
        return self.lo + np.nonzero(self.bits)[0]


@dataclass
class ClassCounts:
    """k-free counts per residue class mod q up to x.

    Classes are labelled a = 1..q, with a = q standing for the zero class, so
    counts[a-1] = #{n <= x : n k-free, n = a mod q}.
    """

    q: int
    k: int
    x: int
    counts: np.ndarray

    def get(self, a: int) -> int:
        if not 1 <= a <= self.q:
            raise ValueError(f"class label must be in 1..{self.q}, got {a}")
        return int(self.counts[a - 1])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def kfree_segment(lo: int, hi: int, k: int,
                  segment_budget: int = DEFAULT_SEGMENT_BUDGET) -> SieveSegment:
    """Sieve the k-free indicator over [lo, hi).

    Clears every multiple of p^k for p <= (hi-1)^(1/k); all other bits stay set.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not 1 <= lo < hi <= MAX_SIEVE_HI:
        raise ValueError(f"require 1 <= lo < hi <= 1e12, got [{lo}, {hi})")
    if hi - lo > segment_budget:
        raise ValueError(f"segment length {hi - lo} exceeds budget {segment_budget}")
    bits = np.ones(hi - lo, dtype=bool)
    for p in primes_up_to(iroot(hi - 1, k)):
        pk = int(p) ** k
        start = ((lo + pk - 1) // pk) * pk
        if start < hi:
            bits[start - lo :: pk] = False
    return SieveSegment(k=k, lo=lo, hi=hi, bits=bits)


def iter_segments(x: int, k: int, segment_budget: int = DEFAULT_SEGMENT_BUDGET):
    """Yield kfree_segment covering [1, x] in fixed-size slabs."""
    lo = 1
    while lo <= x:
        hi = min(lo + segment_budget, x + 1)
        yield kfree_segment(lo, hi, k, segment_budget)
        lo = hi


def count_kfree(x: int, k: int, segment_budget: int = DEFAULT_SEGMENT_BUDGET) -> int:
    """Exact number of k-free integers in [1, x], by segmented sieve."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    return sum(seg.count() for seg in iter_segments(x, k, segment_budget))


def count_kfree_legendre(x: int, k: int) -> int:
    """Independent count via sum over d <= x^(1/k) of mu(d) * floor(x / d^k)."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0
    from .arith import moebius_table

    D = iroot(x, k)
    mu = moebius_table(D)
    return sum(int(mu[d]) * (x // d**k) for d in range(1, D + 1) if mu[d])


def class_counts(x: int, q: int, k: int,
                 segment_budget: int = DEFAULT_SEGMENT_BUDGET) -> ClassCounts:
    """Per-class k-free counts: counts[a-1] = #{n <= x : n k-free, n = a (q)}."""
    if not 1 <= q <= x:
        raise ValueError(f"require 1 <= q <= x, got q={q}, x={x}")
    acc = np.zeros(q, dtype=np.int64)
    for seg in iter_segments(x, k, segment_budget):
        vals = seg.values()
        acc += np.bincount(vals % q, minlength=q)
    counts = np.empty(q, dtype=np.int64)
    counts[: q - 1] = acc[1:]  # residues 1..q-1
    counts[q - 1] = acc[0]     # class q is the zero residue
    return ClassCounts(q=q, k=k, x=x, counts=counts)


def lcm_multiplicity_table(y: int) -> np.ndarray:
    """r(n) = #{(d, d'): lcm(d, d') = n} for n = 0..y (entry 0 unused).

    Multiplicative with r(p^e) = 2e + 1, i.e. r(n) = d(n^2).
    """
    if y < 1:
        raise ValueError(f"y must be >= 1, got {y}")
    r = np.ones(y + 1, dtype=np.int64)
    r[0] = 0
    for p in primes_up_to(y):
        p = int(p)
        e = np.zeros(y + 1, dtype=np.int64)
        pk = p
        while pk <= y:
            e[pk::pk] += 1
            pk *= p
        mask = e > 0
        r[mask] *= 2 * e[mask] + 1
    return r


def lcm_pair_count(y: int) -> int:
    """Exact #{(d, d'): lcm(d, d') <= y} = sum over n <= y of d(n^2)."""
    return int(lcm_multiplicity_table(y)[1:].sum())


def lcm_pair_count_prefix(y: int) -> np.ndarray:
    """Prefix counts: entry i-1 is lcm_pair_count(i), for i = 1..y."""
    return np.cumsum(lcm_multiplicity_table(y)[1:])


def lcm_tail_sum(y: int, k: int, D: int) -> Tuple[Fraction, float]:
    """Exact partial sum over y < lcm(d, d') <= D of 1 / lcm(d, d')^k.

    Returns (partial sum as a rational, estimate of the remainder beyond D).
    The remainder estimate has the shape of the convergent series tail,
    D^(1-k) * (polylog factor), and is reported, not certified.
    """
    if y < 1 or D < y:
        raise ValueError("require 1 <= y <= D")
    if k < 2:
        raise ValueError("k must be >= 2")
    r = lcm_multiplicity_table(D)
    total = Fraction(0)
    for n in range(y + 1, D + 1):
        total += Fraction(int(r[n]), n**k)
    # tail beyond D: sum d(n^2)/n^k <= (max_{n<=4D} d(n^2)/n^0.3) * sum n^(k-0.3 tail)
    c = float(np.max(r[1:] / np.arange(1, D + 1) ** 0.3))
    est = c * D ** (1 - k + 0.3) / (k - 1 - 0.3)
    return total, est
