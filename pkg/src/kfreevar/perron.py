"""Weighted Perron formula verification and contour main terms.

The smoothed partial sum  sum over n <= Q of (Q - n)  equals the vertical-line
integral (1/2 pi i) int zeta(s) Q^(s+1) / (s (s+1)) ds up to O(Q^eps (1 + Q^2/T^2)),
which is checked here by adaptive Gauss-Kronrod quadrature against the exact
closed form.  The same quadrature drives the residue-main-term cross-check and
an oscillatory-integral diagnostic on a left vertical line.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import mpmath
import numpy as np

from .arith import primes_up_to
from .constants import (
    DEFAULT_DPS,
    DEFAULT_PRIME_CUTOFF,
    CertifiedReal,
    _prime_power_parts,
    gamma_const,
    zeta_real,
)
from .density import alpha, beta

# 15-point Kronrod / embedded 7-point Gauss rule on [-1, 1] (QUADPACK dqk15).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
])

_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))          # ascending, 15 nodes
_WEIGHTS_K = np.concatenate((_WGK[:-1], _WGK[::-1]))
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[1:-1:2] = np.concatenate((_WG[:-1], _WG[::-1]))  # Gauss nodes sit at odd slots

_BERN_2R = [mpmath.bernfrac(2 * r) for r in range(1, 12)]
_BERN_2R = [float(p) / float(q) for p, q in _BERN_2R]

ZETA_SIGMA_MIN = -0.9
ZETA_T_MAX = 10**4 + 1e-9


@dataclass(frozen=True)
class ContourSpec:
    """Vertical-line quadrature parameters: abscissa c, height T, error target."""

    c: float
    T: float
    tol_abs: float = 1e-8
    max_panels: int = 200_000

    def __post_init__(self):
        if self.T <= 1:
            raise ValueError("contour height T must exceed 1")


def zeta_em_complex(sigma: float, t: np.ndarray,
                    n_bern: int = 10) -> Tuple[np.ndarray, np.ndarray]:
    """zeta(sigma + i t) for an array of ordinates, by Euler-Maclaurin.

    Uses N = max(50, ceil(3 max|t|)) main terms plus n_bern Bernoulli
    corrections.  Returns (values, heuristic absolute error bounds); the
    bounds track the first omitted correction plus a float64 rounding model.
    """
    t = np.asarray(t, dtype=np.float64)
    if sigma < ZETA_SIGMA_MIN:
        raise ValueError(f"sigma = {sigma} below supported strip (>= -0.9)")
    if np.any(np.abs(t) > ZETA_T_MAX):
        raise ValueError("|t| beyond supported height 1e4")
    s = sigma + 1j * t
    if sigma == 1.0 and np.any(t == 0):
        raise ValueError("zeta has a pole at s = 1")
    t_max = float(np.max(np.abs(t))) if t.size else 0.0
    N = max(50, int(math.ceil(3 * t_max)))
    n = np.arange(1, N, dtype=np.float64)
    ln_n = np.log(n)
    # sum over n < N of n^(-s), vectorized as exp(-s log n)
    main = np.exp(-np.multiply.outer(s, ln_n)).sum(axis=-1)
    lnN = math.log(N)
    Npow = np.exp(-s * lnN)                    # N^(-s)
    total = main + Npow * N / (s - 1) + Npow / 2
    rising = s.copy()
    npow = Npow / N                            # N^(-s-1)
    for r in range(1, n_bern + 1):
        total += _BERN_2R[r - 1] / math.factorial(2 * r) * rising * npow
        rising = rising * (s + 2 * r - 1) * (s + 2 * r)
        npow = npow / (N * N)
    # first omitted correction as the heuristic truncation bound
    omit = abs(_BERN_2R[n_bern]) / math.factorial(2 * n_bern + 2) * np.abs(rising) * np.abs(npow)
    # rounding model: summation noise plus RMS phase error of t*log(n) products
    round_model = (np.sum(n**-sigma) + np.abs(total)) * 2.3e-16 * (math.log2(N) + 8)
    phase_model = 2 * np.abs(t) * math.log(N) * 2.3e-16 * math.sqrt(float(np.sum(n ** (-2 * sigma))))
    return total, (omit * np.abs(s + 2 * n_bern + 1) / (sigma + 2 * n_bern + 1)
                   + round_model + phase_model)


def zeta_complex(s: complex, n_bern: int = 10) -> Tuple[complex, float]:
    """zeta(s) for a single complex point in the supported strip."""
    v, e = zeta_em_complex(float(s.real), np.array([float(s.imag)]), n_bern)
    return complex(v[0]), float(e[0])


def weighted_count(Q: float) -> float:
    """Exact smoothed count sum over n <= Q of (Q - n) = m Q - m(m+1)/2, m = floor(Q).

    Q must not be an integer (the contour comparison needs the jump avoided).
    """
    if Q <= 0:
        raise ValueError("Q must be positive")
    if float(Q) == math.floor(Q):
        raise ValueError("integer Q rejected: the weighted count comparison needs non-integer Q")
    m = math.floor(Q)
    return m * float(Q) - m * (m + 1) / 2.0


def _adaptive_quad(f_batch: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                   tol_abs: float, max_panels: int,
                   seed_width: float) -> Tuple[complex, float, int]:
    """Adaptive Gauss-Kronrod panels for a complex integrand over [a, b].

    f_batch maps an ascending array of points to integrand values.  Panels are
    seeded at seed_width, then the worst panel is bisected until the summed
    |K15 - G7| estimate meets tol_abs.  Reduction order is fixed (ascending
    panel position), so results do not depend on evaluation interleaving.
    """
    n_seed = max(1, int(math.ceil((b - a) / seed_width)))
    edges = np.linspace(a, b, n_seed + 1)
    heap: List[Tuple[float, int, float, float, complex]] = []
    seq = 0
    n_panels = 0

    def do_panel(lo: float, hi: float) -> Tuple[complex, float]:
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        x = mid + half * _NODES
        y = f_batch(x)
        vk = half * np.dot(_WEIGHTS_K, y)
        vg = half * np.dot(_WEIGHTS_G, y)
        return complex(vk), abs(vk - vg) + 1e-300

    for i in range(n_seed):
        val, err = do_panel(edges[i], edges[i + 1])
        heapq.heappush(heap, (-err, seq, edges[i], edges[i + 1], val))
        seq += 1
        n_panels += 1

    while n_panels < max_panels:
        total_err = -sum(item[0] for item in heap)
        if total_err <= tol_abs:
            break
        neg_err, _, lo, hi, _ = heapq.heappop(heap)
        mid = (lo + hi) / 2
        for (l2, h2) in ((lo, mid), (mid, hi)):
            val, err = do_panel(l2, h2)
            heapq.heappush(heap, (-err, seq, l2, h2, val))
            seq += 1
        n_panels += 1

    panels = sorted(heap, key=lambda it: it[2])
    value = complex(
        math.fsum(p[4].real for p in panels),
        math.fsum(p[4].imag for p in panels),
    )
    err = math.fsum(-p[0] for p in panels)
    return value, err, n_panels


@dataclass
class PerronResult:
    """Contour value for the weighted count, with quadrature diagnostics."""

    Q: float
    T: float
    c: float
    value: float
    imag_part: float
    quad_err: float
    n_panels: int


def perron_integral(Q: float, T: float, c: Optional[float] = None,
                    tol_abs: float = 1e-4, max_panels: int = 200_000,
                    mirror: bool = True) -> PerronResult:
    """(1/2 pi i) int over c +/- iT of zeta(s) Q^(s+1) / (s(s+1)) ds.

    With mirror=True (default) the integrand's conjugate symmetry is
    exploited: the [0, T] half is integrated once and doubled, halving zeta
    evaluations, and the imaginary part vanishes identically.  mirror=False
    evaluates both half-lines independently, making the reported imaginary
    part a genuine symmetry diagnostic (it must vanish up to quadrature
    error).
    """
    if c is None:
        c = 1.0 + 1.0 / math.log(Q)
    if T <= 1:
        raise ValueError("T must exceed 1")
    lnQ = math.log(Q)

    def f_batch(t: np.ndarray) -> np.ndarray:
        s = c + 1j * t
        z, _ = zeta_em_complex(c, t)
        qpow = math.exp((c + 1) * lnQ) * np.exp(1j * t * lnQ)
        return z * qpow / (s * (s + 1))

    seed = min(1.0, 2 * math.pi / lnQ)
    total, err, n_panels = (0 + 0j), 0.0, 0
    if mirror:
        v, e, n_panels = _adaptive_quad(f_batch, 0.0, float(T), tol_abs / 2,
                                        max_panels // 2, seed)
        total = v + v.conjugate()
        err = 2 * e
    else:
        for (a, b) in ((-float(T), 0.0), (0.0, float(T))):
            v, e, n = _adaptive_quad(f_batch, a, b, tol_abs / 2, max_panels // 2, seed)
            total += v
            err += e
            n_panels += n
    scale = 1.0 / (2 * math.pi)
    return PerronResult(Q=float(Q), T=float(T), c=c, value=total.real * scale,
                        imag_part=total.imag * scale, quad_err=err * scale,
                        n_panels=n_panels)


def residue_main_terms(X: float, q: int, k: int, dps: int = DEFAULT_DPS,
                       P: int = DEFAULT_PRIME_CUTOFF) -> CertifiedReal:
    """Main terms of the contour integral:

    M(X) = alpha X^2 / 2 - beta X / 2 + k gamma X^(1/k) / ((-1 + 1/k) zeta(2)).

    alpha and beta enter exactly through the density module; gamma through the
    certified Euler product.
    """
    if X <= 0:
        raise ValueError("X must be positive")
    zk = zeta_real(k, dps)
    Xc = CertifiedReal.exact(Fraction(X) if not isinstance(X, float) else X)
    a_num = alpha(q, k).evaluate(zk)
    b_num = beta(k).evaluate(zk)
    g = gamma_const(q, k, dps, P)
    term1 = a_num * Xc.pow_int(2).scale(Fraction(1, 2))
    term2 = b_num * Xc.scale(Fraction(1, 2))
    term3 = (
        CertifiedReal.exact(k) * g * Xc.pow_real(Fraction(1, k))
        / (CertifiedReal.exact(Fraction(1, k) - 1) * zeta_real(2, dps))
    )
    return term1 - term2 + term3


def _fstar_complex_batch(s: np.ndarray, q: int, k: int, P: int) -> np.ndarray:
    """F*(s) for an array of complex s, truncated at prime cutoff P."""
    p = primes_up_to(P).astype(np.float64)
    ln_p = np.log(p)
    out = np.empty(len(s), dtype=np.complex128)
    parts = _prime_power_parts(q, k)
    for i, si in enumerate(s):
        pk1s = np.exp(-k * (1 + si) * ln_p)       # p^(-k(1+s))
        v = np.prod(1 - 2.0 / (p**k * (1 + pk1s)))
        for pp, g in parts:
            tg = g**si * complex(pp) ** (-k * (1 + si))  # (q,p^k)^s / p^(k(1+s))
            tp = complex(pp) ** (-k * (1 + si))
            v *= (1 - 2.0 / (pp**k * (1 + tg))) * (1 + tg) / (1 + tp)
            if pp <= P:
                v /= 1 - 2.0 / (pp**k * (1 + tp))
        out[i] = v
    return out


def contour_main_integral(X: float, q: int, k: int, T: float,
                          c: Optional[float] = None, P: int = 10**4,
                          tol_abs: float = 1e-4,
                          max_panels: int = 400_000) -> Tuple[float, float]:
    """Quadrature of the full integrand
    zeta(s) zeta(k(s+1)) F*(s) X^(s+1) / (s (s+1) zeta(2k(s+1)))
    over the segment c +/- iT, exploiting conjugate symmetry (the integrand
    pairs conjugate points, so the [0, T] half carries everything).

    Returns (value, quadrature error estimate); compare with residue_main_terms.
    """
    if c is None:
        c = 1.0 + 1.0 / math.log(X)
    lnX = math.log(X)

    def f_batch(t: np.ndarray) -> np.ndarray:
        s = c + 1j * t
        z1, _ = zeta_em_complex(c, t)
        z2, _ = zeta_em_complex(k * (c + 1), k * t)
        z3, _ = zeta_em_complex(2 * k * (c + 1), 2 * k * t)
        fs = _fstar_complex_batch(s, q, k, P)
        xpow = math.exp((c + 1) * lnX) * np.exp(1j * t * lnX)
        return z1 * z2 * fs * xpow / (s * (s + 1) * z3)

    seed = min(1.0, 2 * math.pi / lnX)
    v, e, _ = _adaptive_quad(f_batch, 0.0, float(T), tol_abs, max_panels, seed)
    # conjugate half doubles the real part; (1/2 pi i) ds = (1/2 pi) dt
    return 2 * v.real / (2 * math.pi), 2 * e / (2 * math.pi)


@dataclass
class OscRow:
    """One dyadic block of the oscillatory-integral diagnostic."""

    L: float
    value_re: float
    value_im: float
    abs_value: float
    envelope: float
    ratio: float


def osc_diagnostic(L: float, Q: float, k: int, Delta: float,
                   tol_abs: float = 1e-8) -> List[OscRow]:
    """int from 1 to L' of zeta(R1+it) zeta(R2+it) Q^(it) / t^2 dt at dyadic L'.

    R1 = -1 + Delta, R2 = Delta k with Delta in [1/(2k), 1/k).  Each row logs
    the integral alongside the envelope L'^(1/4 - 1/(2k)) log L'; ratios are
    informational only (the implied constant is not specified by theory).
    """
    if not (1.0 / (2 * k) <= Delta < 1.0 / k):
        raise ValueError("Delta must lie in [1/(2k), 1/k)")
    if L < 2:
        raise ValueError("L must be >= 2")
    R1 = -1 + Delta
    R2 = Delta * k
    lnQ = math.log(Q) if Q != 1 else 0.0

    def f_batch(t: np.ndarray) -> np.ndarray:
        z1, _ = zeta_em_complex(R1, t)
        z2, _ = zeta_em_complex(R2, t)
        qpow = np.exp(1j * t * lnQ) if lnQ else 1.0
        return z1 * z2 * qpow / (t * t)

    rows: List[OscRow] = []
    total = 0 + 0j
    lo = 1.0
    Lp = 2.0
    while Lp <= L + 1e-12:
        v, e, _ = _adaptive_quad(f_batch, lo, Lp, tol_abs, 50_000, 0.5)
        total += v
        env = Lp ** (0.25 - 1.0 / (2 * k)) * math.log(Lp)
        rows.append(OscRow(L=Lp, value_re=total.real, value_im=total.imag,
                           abs_value=abs(total), envelope=env,
                           ratio=abs(total) / env))
        lo = Lp
        Lp *= 2
    return rows
