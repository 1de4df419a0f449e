import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halasz.errors import CapacityError
from halasz.primes import build_tables, factorize, prime_power_split, von_mangoldt

from oracles import is_prime, primes_upto, trial_factor


def test_small_prime_lists():
    assert build_tables(10).primes.tolist() == [2, 3, 5, 7]
    assert build_tables(2).primes.tolist() == [2]


def test_prime_count_to_a_million(tables):
    # trial division by every d <= 1000, vectorized over n
    n = np.arange(10**6 + 1)
    composite = n < 2
    for d in range(2, 1001):
        composite |= (n % d == 0) & (n != d)
    assert int((~composite).sum()) == 78498
    assert tables.primes.size == 78498
    assert np.array_equal(np.flatnonzero(~composite), tables.primes)


def test_tables_match_trial_division(small_tables):
    assert small_tables.primes.tolist() == primes_upto(10**4)


def test_spf_invariant(small_tables):
    spf = small_tables.spf
    for n in range(2, 3000):
        p = int(spf[n])
        assert n % p == 0 and is_prime(p)
        assert all(n % q for q in range(2, p))


def test_capacity_errors():
    with pytest.raises(CapacityError):
        build_tables(1)
    with pytest.raises(CapacityError):
        build_tables(10**9)
    with pytest.raises(CapacityError):
        build_tables(1000, max_limit=100)
    t = build_tables(100)
    with pytest.raises(CapacityError):
        von_mangoldt(t, 101)
    with pytest.raises(CapacityError):
        factorize(t, 101)


def test_von_mangoldt_examples(small_tables):
    assert von_mangoldt(small_tables, 1) == 0
    assert von_mangoldt(small_tables, 8) == pytest.approx(math.log(2))
    assert von_mangoldt(small_tables, 12) == 0
    assert sum(von_mangoldt(small_tables, d) for d in (1, 2, 3, 4, 6, 12)) == pytest.approx(math.log(12))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**4))
def test_divisor_identity(n):
    t = _T10K
    total = math.fsum(von_mangoldt(t, d) for d in range(1, n + 1) if n % d == 0)
    assert total == pytest.approx(math.log(n), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**4))
def test_factorize_recomposes(n):
    pairs = factorize(_T10K, n)
    assert math.prod(p**e for p, e in pairs) == n
    assert [p for p, _ in pairs] == sorted({p for p, _ in pairs})
    assert pairs == trial_factor(n)


def test_factorize_one(small_tables):
    assert factorize(small_tables, 1) == []


def test_prime_power_split(small_tables):
    n = np.arange(2, 5001)
    p, k, rest = prime_power_split(small_tables, n)
    assert np.array_equal(p.astype(np.int64) ** k * rest, n)
    assert np.all(rest % p != 0)


def test_primes_in_bounds(small_tables):
    assert small_tables.primes_in(2, 11).tolist() == [3, 5, 7, 11]
    assert small_tables.primes_in(2, 11, lo_inclusive=True).tolist() == [2, 3, 5, 7, 11]
    assert small_tables.prime_count(100) == 25


def test_lambda_array(small_tables):
    lam = small_tables.lam
    for n in range(1, 2000):
        f = trial_factor(n)
        expected = math.log(f[0][0]) if len(f) == 1 else 0.0
        assert lam[n] == pytest.approx(expected)


_T10K = build_tables(10**4)
