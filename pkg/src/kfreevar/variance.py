"""Variance of k-free counts over residue classes: exact form, decomposition,
truncated Dirichlet double sum, and the main-term / error-budget comparison.

The variance V = sum over classes of (N_a - x * density_a)^2 is assembled
symbolically in Q[zeta(k)^-1] and evaluated numerically only at the end, so
the cancellation of its x^2 and x coefficients against the mean-square and
partition identities is an exact statement, not a float coincidence.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .arith import factorize, gcd_pow_k, moebius_table
from .constants import DEFAULT_DPS, DEFAULT_PRIME_CUTOFF, CertifiedReal, f_k_of_q, zeta_real
from .density import ZetaPoly, eta_fraction
from .sieve import ClassCounts, class_counts, count_kfree, lcm_multiplicity_table

MAX_X = 10**9


@dataclass
class VarianceReport:
    """Everything computed for one (x, q, k) cell of a scan."""

    x: int
    q: int
    k: int
    v_exact: Optional[ZetaPoly] = None
    v_num: Optional[CertifiedReal] = None
    a_diag: Optional[int] = None          # sum of squared class counts
    b_poly: Optional[ZetaPoly] = None     # sum of density * class count
    c_pairs: Optional[int] = None         # same-class pairs n < n'
    main: Optional[CertifiedReal] = None
    budget: Optional[float] = None
    ratio: Optional[float] = None
    wall_time: float = 0.0
    error: Optional[str] = None


def _check_range(x: int, q: int, k: int) -> None:
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 1 <= q <= x:
        raise ValueError(f"require 1 <= q <= x, got q={q}, x={x}")
    if x > MAX_X:
        raise ValueError(f"x = {x} beyond the sieve budget 1e9")


def _pattern_numerators(q: int, k: int) -> Tuple[np.ndarray, List[int], int]:
    """Vectorized exact numerators of the class densities.

    density(q, a) = n_a / (Dq * zeta(k)) with the common denominator
    Dq = q * prod over p | q of (p^k - 1) and the integer numerator n_a
    determined by which prime-power marks m_p = p^min(v_p(q), k) divide a.
    Returns (pattern index per class a = 1..q, numerator per pattern, Dq).
    """
    parts = [(p, e) for p, e in factorize(q).factors]
    a = np.arange(1, q + 1, dtype=np.int64)
    idx = np.zeros(q, dtype=np.int64)
    Dq = q
    for j, (p, e) in enumerate(parts):
        m = p ** min(e, k)
        idx |= ((a % m) == 0).astype(np.int64) << j
        Dq *= p**k - 1
    numers = []
    for pat in range(1 << len(parts)):
        n_val = 1
        for j, (p, e) in enumerate(parts):
            pk = p**k
            g = p ** min(e, k)
            n_val *= (pk - g) if (pat >> j) & 1 else pk
        numers.append(n_val)
    return idx, numers, Dq


def variance_exact(x: int, q: int, k: int,
                   counts: Optional[ClassCounts] = None) -> ZetaPoly:
    """Exact variance in Q[zeta(k)^-1], accumulated class by class.

    Expands sum over a of (N_a - x n_a / (Dq zeta))^2 with integer class
    aggregates grouped by divisibility pattern of a; exponents live at 0, 1, 2.
    """
    _check_range(x, q, k)
    if counts is None:
        counts = class_counts(x, q, k)
    N = counts.counts
    idx, numers, Dq = _pattern_numerators(q, k)
    s0 = int(np.dot(N, N))
    s1 = 0
    s2 = 0
    for pat, n_val in enumerate(numers):
        mask = idx == pat
        cnt = int(np.count_nonzero(mask))
        if cnt == 0:
            continue
        sN = int(N[mask].sum())
        s1 += n_val * sN
        s2 += n_val * n_val * cnt
    return ZetaPoly.make(k, {
        0: s0,
        1: Fraction(-2 * x * s1, Dq),
        2: Fraction(x * x * s2, Dq * Dq),
    })


def decomposition(x: int, q: int, k: int,
                  counts: Optional[ClassCounts] = None,
                  ) -> Tuple[int, ZetaPoly, int, ZetaPoly]:
    """(A, B, C, S) with A = sum N_a^2, B = sum density_a N_a,
    C = sum N_a (N_a - 1) / 2, S = sum density_a^2.

    B and S are grouped over gcd classes (density depends on a only through
    gcd(q, a)), a deliberately different route from variance_exact's
    divisibility patterns; A - 2xB + x^2 S must reproduce variance_exact
    term by term, and A = 2C + count_kfree(x, k) exactly.
    """
    _check_range(x, q, k)
    if counts is None:
        counts = class_counts(x, q, k)
    N = counts.counts
    a_diag = int(np.dot(N, N))
    c_pairs = int((N * (N - 1) // 2).sum())
    g = np.gcd(np.arange(1, q + 1, dtype=np.int64), np.int64(q))
    b_sum = Fraction(0)
    s_sum = Fraction(0)
    for d in sorted(set(int(v) for v in np.unique(g))):
        mask = g == d
        r = eta_fraction(q, d, k)
        b_sum += r * int(N[mask].sum())
        s_sum += r * r * int(np.count_nonzero(mask))
    B = ZetaPoly.make(k, {1: b_sum})
    S = ZetaPoly.make(k, {2: s_sum})
    return a_diag, B, c_pairs, S


def weighted_tally(Q: Fraction) -> Fraction:
    """sum over 1 <= l <= Q of (Q - l), exactly: m Q - m(m+1)/2, m = floor(Q)."""
    m = math.floor(Q)
    return m * Q - Fraction(m * (m + 1), 2)


def j_truncated(x, q: int, k: int, D: int,
                half_shift: bool = False) -> Tuple[CertifiedReal, float]:
    """Truncated smoothed double sum

    J_D = sum over squarefree d, d' <= D of
          mu(d) mu(d') * L / lcm(d, d')^k * sum over l <= x/L of (x/L - l),
    L = lcm(q, gcd(d, d')^k), evaluated in exact rational arithmetic.

    Returns (value, remainder estimate); the remainder beyond D has the shape
    x^2 D^(1-k+eps) / q and is estimated from the lcm-multiplicity series.
    half_shift replaces x by x + 1/2 (non-integer cutoff for contour work).
    """
    if D < 1:
        raise ValueError("D must be >= 1")
    _check_range(int(x), q, k)
    X = Fraction(x) + (Fraction(1, 2) if half_shift else 0)
    mu = moebius_table(D)
    sqfree = [d for d in range(1, D + 1) if mu[d]]
    total = Fraction(0)
    for d in sqfree:
        md = int(mu[d])
        for d2 in sqfree:
            g = math.gcd(d, d2)
            lcm_k = (d * d2 // g) ** k
            gk = g**k
            L = q * gk // math.gcd(q, gk)
            if L > X:
                continue
            total += Fraction(md * int(mu[d2]) * L, lcm_k) * weighted_tally(X / L)
    # remainder estimate: (x^2 / 2q) * sum over lcm values n > D of r(n)/n^k,
    # with the series tail continued by its leading n^(eps-k) envelope
    hi = min(max(4 * D, 1000), 10**6)
    r = lcm_multiplicity_table(hi)
    n = np.arange(1, hi + 1, dtype=np.float64)
    tail_series = float(np.sum(r[D + 1 :] / n[D:] ** k))
    tail_series += float(np.max(r[1:] / n**0.3)) * hi ** (1 - k + 0.3) / (k - 1 - 0.3)
    est = float(X) ** 2 / (2 * q) * tail_series
    value = CertifiedReal.exact(total)
    return value, est


def main_term(x, q: int, k: int, dps: int = DEFAULT_DPS,
              P: int = DEFAULT_PRIME_CUTOFF) -> CertifiedReal:
    """Leading term q (x/q)^(1/k) f_k(q) of the variance."""
    _check_range(int(x), q, k)
    ratio = CertifiedReal.exact(Fraction(x, q) if not isinstance(x, float) else x / q)
    return CertifiedReal.exact(q) * ratio.pow_real(Fraction(1, k)) * f_k_of_q(q, k, dps, P)


def error_budget(x, q: int, k: int, eps: float = 0.0) -> float:
    """x^eps (q (x/q)^(2/(9-2/k)) + x^(1+2/(k+1)) / q)."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    x = float(x)
    first = q * (x / q) ** (2.0 / (9.0 - 2.0 / k))
    second = x ** (1.0 + 2.0 / (k + 1)) / q
    return x**eps * (first + second)


def make_report(x: int, q: int, k: int, eps: float = 0.0, dps: int = DEFAULT_DPS,
                P: int = DEFAULT_PRIME_CUTOFF,
                counts: Optional[ClassCounts] = None) -> VarianceReport:
    """Full pipeline for one (x, q, k): exact variance, numeric value, main
    term, budget, and ratio."""
    t0 = time.perf_counter()
    rep = VarianceReport(x=x, q=q, k=k)
    try:
        _check_range(x, q, k)
        if counts is None:
            counts = class_counts(x, q, k)
        rep.v_exact = variance_exact(x, q, k, counts=counts)
        a_diag, B, c_pairs, _ = decomposition(x, q, k, counts=counts)
        rep.a_diag, rep.b_poly, rep.c_pairs = a_diag, B, c_pairs
        zk = zeta_real(k, dps)
        rep.v_num = rep.v_exact.evaluate(zk)
        rep.main = main_term(x, q, k, dps, P)
        rep.budget = error_budget(x, q, k, eps)
        if rep.main.float != 0:
            rep.ratio = rep.v_num.float / rep.main.float
    except Exception as exc:  # per-entry failure: recorded, scan continues
        rep.error = f"{type(exc).__name__}: {exc}"
    rep.wall_time = time.perf_counter() - t0
    return rep


def scan(x: int, q_list: Iterable[int], k: int, eps: float = 0.0,
         dps: int = DEFAULT_DPS, P: int = DEFAULT_PRIME_CUTOFF,
         threads: int = 1) -> List[VarianceReport]:
    """One VarianceReport per q, in input order; failures are recorded
    per-entry and do not abort the scan."""
    qs = list(q_list)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda q: make_report(x, q, k, eps, dps, P), qs))
    return [make_report(x, q, k, eps, dps, P) for q in qs]
