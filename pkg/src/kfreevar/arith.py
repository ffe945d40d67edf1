"""Exact integer arithmetic: factorization, Mobius, gcd/lcm of k-th powers.

Everything here is pure and deterministic.  k-th powers are never formed
when a gcd can be read off the exponent vectors instead, so q*d^k-scale
intermediates stay out of the hot paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

# Exact rational carrier used throughout the package.
BigRational = Fraction

_MAX_N = 2**63

# Growable shared prime table (trial division, sieving, Euler products).
_prime_limit = 0
_prime_array = np.empty(0, dtype=np.int64)


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (cached, grows geometrically)."""
    global _prime_limit, _prime_array
    if n > _prime_limit:
        limit = max(n, 2 * _prime_limit, 1 << 16)
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        _prime_array = np.nonzero(sieve)[0].astype(np.int64)
        _prime_limit = limit
    return _prime_array[: np.searchsorted(_prime_array, n, side="right")]


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power decomposition: strictly increasing primes, exponents >= 1.

    The empty list represents n = 1.
    """

    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"non-canonical factorization {self.factors}")
            last = p

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def radical(self) -> int:
        out = 1
        for p, _ in self.factors:
            out *= p
        return out


def _is_probable_prime(n: int) -> bool:
    # Deterministic Miller-Rabin for n < 3.3e24 with the standard witness set.
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # Brent's cycle variant; n must be odd composite and not a prime power hit
    # by trial division already.
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed on {n}")  # pragma: no cover


def factorize(n: int) -> Factorization:
    """Canonical factorization of 1 <= n <= 2^63.

    Trial division over the shared prime table (up to 10^6), Pollard rho on
    any remaining cofactor.
    """
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    if n > _MAX_N:
        raise ValueError(f"factorize requires n <= 2^63, got {n}")
    out: List[Tuple[int, int]] = []
    m = n
    for p in primes_up_to(min(10**6, math.isqrt(n) + 1)):
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        rest = _factor_large(m)
        out.extend(sorted(rest.items()))
    out.sort()
    return Factorization(tuple(out))


def _factor_large(m: int) -> dict:
    # m has no prime factor <= 10^6 (or <= sqrt of the original n).
    if _is_probable_prime(m):
        return {m: 1}
    d = _pollard_rho(m)
    left = _factor_large(d)
    for p, e in _factor_large(m // d).items():
        left[p] = left.get(p, 0) + e
    return left


def moebius(n: int) -> int:
    """mu(n): 0 unless n is squarefree, else (-1)^(number of prime factors)."""
    if n < 1:
        raise ValueError(f"moebius requires n >= 1, got {n}")
    f = factorize(n)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def moebius_table(n: int) -> np.ndarray:
    """mu(1..n) as an int8 array indexed by value (entry 0 unused)."""
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_up_to(math.isqrt(n)):
        p = int(p)
        mu[p * p :: p * p] = 0
    # sign: flip once per prime divisor
    sign = np.ones(n + 1, dtype=np.int8)
    for p in primes_up_to(n):
        sign[p::p] = -sign[p::p]
    return mu * sign


def v_p(n: int, p: int) -> int:
    """Exponent of the prime p in n."""
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def gcd_pow_k(q: int, d: int, k: int) -> int:
    """(q, d^k) computed from exponent vectors; d^k is never formed.

    Equals prod over p of p^min(v_p(q), k*v_p(d)).
    """
    if q < 1 or d < 1:
        raise ValueError("gcd_pow_k requires q, d >= 1")
    g = math.gcd(q, d)
    if g == 1:
        return 1
    out = 1
    for p, _ in factorize(g).factors:
        out *= p ** min(v_p(q, p), k * v_p(d, p))
    return out


def lcm_pow_k(d: int, d2: int, k: int) -> int:
    """Exact lcm(d^k, d2^k).

    max(k*a, k*b) = k*max(a, b) on exponents, so this is lcm(d, d2)^k for any
    arguments, squarefree or not.
    """
    if d < 1 or d2 < 1:
        raise ValueError("lcm_pow_k requires d, d2 >= 1")
    return (d // math.gcd(d, d2) * d2) ** k


def iroot(n: int, k: int) -> int:
    """floor(n^(1/k)) for n >= 0, k >= 1, exact."""
    if n < 0:
        raise ValueError("iroot requires n >= 0")
    if n == 0:
        return 0
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r
