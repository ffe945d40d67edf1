"""Exact densities of k-free numbers in residue classes.

The density of k-free integers in the class a mod q is a rational multiple of
1/zeta(k).  All identities here are checked in the ring Q[zeta(k)^-1], i.e. as
polynomials in the formal symbol z = zeta(k)^-1 with rational coefficients, so
"equal" means identically equal, not numerically close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple, Union

import numpy as np

from .arith import Factorization, factorize, moebius_table

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class ZetaPoly:
    """Element of Q[zeta(k)^-1]: finite map exponent e -> rational coefficient.

    Represents sum over e of c_e * zeta(k)^(-e).  Stored canonically with no
    zero coefficients, so equality of values is equality of dicts.
    """

    k: int
    terms: Tuple[Tuple[int, Fraction], ...]

    @staticmethod
    def make(k: int, coeffs: Dict[int, Scalar]) -> "ZetaPoly":
        clean = tuple(sorted((e, Fraction(c)) for e, c in coeffs.items() if c != 0))
        for e, _ in clean:
            if e < 0:
                raise ValueError("exponents must be non-negative")
        return ZetaPoly(k=k, terms=clean)

    @staticmethod
    def zero(k: int) -> "ZetaPoly":
        return ZetaPoly(k=k, terms=())

    @staticmethod
    def monomial(k: int, coeff: Scalar, e: int) -> "ZetaPoly":
        return ZetaPoly.make(k, {e: coeff})

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.terms)

    def coeff(self, e: int) -> Fraction:
        return dict(self.terms).get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def _binop(self, other: "ZetaPoly", sign: int) -> "ZetaPoly":
        if self.k != other.k:
            raise ValueError("mixed k in ZetaPoly arithmetic")
        out = dict(self.terms)
        for e, c in other.terms:
            out[e] = out.get(e, Fraction(0)) + sign * c
        return ZetaPoly.make(self.k, out)

    def __add__(self, other: "ZetaPoly") -> "ZetaPoly":
        return self._binop(other, +1)

    def __sub__(self, other: "ZetaPoly") -> "ZetaPoly":
        return self._binop(other, -1)

    def __neg__(self) -> "ZetaPoly":
        return ZetaPoly.make(self.k, {e: -c for e, c in self.terms})

    def __mul__(self, other):
        if isinstance(other, ZetaPoly):
            if self.k != other.k:
                raise ValueError("mixed k in ZetaPoly arithmetic")
            out: Dict[int, Fraction] = {}
            for e1, c1 in self.terms:
                for e2, c2 in other.terms:
                    out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
            return ZetaPoly.make(self.k, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "ZetaPoly":
        c = Fraction(c)
        return ZetaPoly.make(self.k, {e: c * v for e, v in self.terms})

    def evaluate(self, zeta_k) -> "CertifiedReal":
        """Numeric value with error propagation, given zeta(k) as CertifiedReal."""
        from .constants import CertifiedReal

        zinv = CertifiedReal.exact(1) / zeta_k
        total = CertifiedReal.exact(0)
        for e, c in self.terms:
            total = total + CertifiedReal.exact(c) * zinv.pow_int(e)
        return total

    def evaluate_float(self, zeta_k_value: float) -> float:
        zinv = 1.0 / zeta_k_value
        return math.fsum(float(c) * zinv**e for e, c in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.terms:
            if e == 0:
                bits.append(f"{c}")
            elif e == 1:
                bits.append(f"{c}*z")
            else:
                bits.append(f"{c}*z^{e}")
        return " + ".join(bits) + f"  [z = 1/zeta({self.k})]"


def _local_data(q: int, k: int) -> List[Tuple[int, int, int]]:
    """Per prime p | q: (p, p^k, g) with g = (q, p^k) = p^min(v_p(q), k)."""
    out = []
    for p, e in factorize(q).factors:
        out.append((p, p**k, p ** min(e, k)))
    return out


def eta_fraction(q: int, a: int, k: int) -> Fraction:
    """Rational r with density(q, a) = r / zeta(k).

    Closed form: r = (1/q) * prod over p | q of (p^k - c_p * (q,p^k)) / (p^k - 1)
    where c_p = 1 if p^min(v_p(q),k) divides a, else 0.  Derived from the
    defining series by splitting d into its part supported on q and the part
    coprime to q; validated against truncated direct summation in the tests.
    """
    if q < 1 or k < 2:
        raise ValueError("require q >= 1 and k >= 2")
    if not 1 <= a <= q:
        raise ValueError(f"class label a must be in 1..{q}, got {a}")
    r = Fraction(1, q)
    for _, pk, g in _local_data(q, k):
        c = 1 if a % g == 0 else 0
        r *= Fraction(pk - c * g, pk - 1)
    return r


def eta(q: int, a: int, k: int) -> ZetaPoly:
    """Density of k-free numbers in the class a mod q, as r * zeta(k)^-1."""
    return ZetaPoly.monomial(k, eta_fraction(q, a, k), 1)


def eta_table(q: int, k: int) -> List[ZetaPoly]:
    """Densities for all classes a = 1..q (index a-1).

    Since the density depends on a only through gcd(q, a), only one
    evaluation per divisor class is performed and then broadcast.
    """
    cache: Dict[int, ZetaPoly] = {}
    out = []
    for a in range(1, q + 1):
        d = math.gcd(q, a)
        if d not in cache:
            cache[d] = eta(q, d, k)
        out.append(cache[d])
    return out


def alpha(q: int, k: int) -> ZetaPoly:
    """The q-local mean-square constant: sum over classes of density^2 times q.

    Equals zeta(k)^-2 * prod over p | q of (p^k-1)^-2 * (p^2k - 2 p^k + (q,p^k)),
    with the generic Euler factor product identified exactly as zeta(k)^-2.
    """
    r = Fraction(1)
    for _, pk, g in _local_data(q, k):
        r *= Fraction(pk * pk - 2 * pk + g, (pk - 1) ** 2)
    return ZetaPoly.monomial(k, r, 2)


def beta(k: int) -> ZetaPoly:
    """The mean density over all classes: exactly zeta(k)^-1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return ZetaPoly.monomial(k, 1, 1)


def check_sum_eta_sq(q: int, k: int) -> Tuple[bool, ZetaPoly]:
    """Exact check of sum over a = 1..q of density^2 == alpha(q,k) / q.

    Returns (holds, discrepancy) with the discrepancy in Q[zeta(k)^-1];
    holds iff the discrepancy is identically zero.
    """
    total = ZetaPoly.zero(k)
    for poly in eta_table(q, k):
        total = total + poly * poly
    disc = total - alpha(q, k).scale(Fraction(1, q))
    return disc.is_zero(), disc


def eta_series_partial(q: int, k: int, D: int) -> np.ndarray:
    """Truncated defining series for every class: entry a-1 is
    sum over d <= D with (q, d^k) | a of mu(d) / lcm(q, d^k), as float64.

    Direct summation of the definition; the closed form must agree within
    eta_series_tail_bound.
    """
    if q < 1 or D < 1:
        raise ValueError("require q >= 1 and D >= 1")
    d = np.arange(1, D + 1, dtype=np.int64)
    if (float(D) ** k) * q >= 2**62:
        raise ValueError("truncation too large for int64 lcm values")
    dk = d**k
    g = np.gcd(np.int64(q), dk)          # (q, d^k)
    L = (q // g) * dk                    # lcm(q, d^k)
    mu = moebius_table(D)[1:].astype(np.float64)
    w = mu / L.astype(np.float64)
    out = np.empty(q)
    for a in range(1, q + 1):
        mask = (a % g) == 0
        out[a - 1] = math.fsum(w[mask])
    return out


def eta_series_tail_bound(q: int, k: int, D: int) -> float:
    """Rigorous bound for the tail of the defining series beyond d = D.

    Each term is at most (q, d^k) / (q d^k) <= Q_k / (q d^k) with
    Q_k = prod over p | q of p^min(v_p(q), k), and sum over d > D of d^-k
    is at most D^(1-k) / (k-1).
    """
    qk = 1
    for _, _, g in _local_data(q, k):
        qk *= g
    return (qk / q) * D ** (1 - k) / (k - 1)
