import math
import random

import pytest

from kfreevar.arith import (
    Factorization,
    factorize,
    gcd_pow_k,
    iroot,
    lcm_pow_k,
    moebius,
    moebius_table,
    primes_up_to,
)


def trial_division(n):
    """Independent oracle: naive trial division."""
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def test_factorize_examples():
    assert factorize(12).factors == ((2, 2), (3, 1))
    assert factorize(1).factors == ()
    assert factorize(9991).factors == trial_division(9991) == ((97, 1), (103, 1))


def test_factorize_rejects_zero():
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_roundtrip_exhaustive():
    for n in range(1, 10**5 + 1):
        assert factorize(n).n == n


def test_factorize_large_semiprime_uses_rho_path():
    p, q = 1_000_000_007, 1_000_000_009
    assert factorize(p * q).factors == ((p, 1), (q, 1))


def test_factorization_invariants():
    with pytest.raises(ValueError):
        Factorization(((3, 1), (2, 1)))
    with pytest.raises(ValueError):
        Factorization(((2, 0),))


def test_moebius_examples():
    assert moebius(1) == 1
    assert moebius(4) == 0
    assert moebius(30) == -1


def test_moebius_multiplicative_on_coprime_pairs():
    rng = random.Random(20240801)
    pairs = 0
    while pairs < 300:
        m = rng.randint(1, 1000)
        n = rng.randint(1, 1000)
        if math.gcd(m, n) != 1 or m * n > 10**6:
            continue
        assert moebius(m * n) == moebius(m) * moebius(n)
        pairs += 1


def test_moebius_table_matches_pointwise():
    mu = moebius_table(2000)
    for n in range(1, 2001):
        assert int(mu[n]) == moebius(n)


def test_gcd_pow_k_examples():
    assert gcd_pow_k(12, 2, 2) == 4
    assert gcd_pow_k(8, 2, 3) == 8
    assert gcd_pow_k(5, 3, 2) == 1


def test_gcd_lcm_pow_k_identity():
    # gcd(q, d^k) * lcm(q, d^k) == q * d^k, checked in arbitrary precision
    rng = random.Random(7)
    for _ in range(2000):
        q = rng.randint(1, 1000)
        d = rng.randint(1, 1000)
        k = rng.choice((2, 3, 4))
        g = gcd_pow_k(q, d, k)
        dk = d**k
        assert q % g == 0 and dk % g == 0
        assert g * (q * dk // math.gcd(q, dk)) == q * dk
        assert g == math.gcd(q, dk)


def test_lcm_pow_k_examples_and_oracle():
    assert lcm_pow_k(2, 3, 2) == 36
    assert lcm_pow_k(2, 2, 2) == 4
    assert lcm_pow_k(6, 4, 2) == 144
    for d in range(1, 40):
        for d2 in range(1, 40):
            for k in (2, 3):
                direct = (d**k) * (d2**k) // math.gcd(d**k, d2**k)
                assert lcm_pow_k(d, d2, k) == direct


def test_iroot():
    for n in (0, 1, 7, 8, 9, 10**12, 10**12 + 1):
        for k in (2, 3, 5):
            r = iroot(n, k)
            assert r**k <= n < (r + 1) ** k


def test_primes_up_to_growing_cache():
    assert list(primes_up_to(10)) == [2, 3, 5, 7]
    assert primes_up_to(100)[-1] == 97
    assert len(primes_up_to(10**6)) == 78498
