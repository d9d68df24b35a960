import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ramexp.core_arith import (
    build_tables,
    divisor_count,
    euler_phi,
    moebius,
    primorial,
    ramanujan_matrix,
    ramanujan_period,
    ramanujan_row,
    ramanujan_sum,
    ramanujan_sum_holder,
    ramanujan_sums,
)
from ramexp.errors import InvalidArgumentError, ResourceLimitError

_T = build_tables(5000)


def test_tables_at_one():
    t = build_tables(1)
    assert t.mu[1:].tolist() == [1]
    assert t.phi[1:].tolist() == [1]


def test_small_tables():
    t = build_tables(10)
    assert t.mu[1:7].tolist() == [1, -1, -1, 0, -1, 1]
    assert t.phi[10] == 4


def test_bad_limits():
    with pytest.raises(InvalidArgumentError):
        build_tables(0)
    with pytest.raises(ResourceLimitError):
        build_tables(10**12)


def test_tables_read_only(small):
    with pytest.raises(ValueError):
        small.mu[3] = 5


def test_mu_phi_against_trial_division(small):
    for n in range(1, 400):
        assert small.mu[n] == oracles.mu(n)
        assert small.phi[n] == oracles.phi(n)


def test_mu_zero_iff_square_factor(small):
    for n in range(1, 2000):
        squareful = any(k > 1 for k in oracles.factor(n).values())
        assert (small.mu[n] == 0) == squareful


def test_phi_divisor_sum(small):
    for n in range(1, 3000):
        assert sum(int(small.phi[d]) for d in small.divisors(n)) == n


def test_spf_and_factorize(small):
    for n in range(2, 3000):
        f = small.factorize(n)
        assert dict(f) == oracles.factor(n)
        assert small.spf[n] == min(oracles.factor(n))


def test_large_tables_spot_checks(tables):
    for n in (999983, 999984, 720720, 510510, 2**19, 3**12):
        assert tables.mu[n] == oracles.mu(n)
        fac = oracles.factor(n)
        assert tables.phi[n] == round(n * math.prod(1 - 1 / p for p in fac))


def test_csum_examples(small):
    assert ramanujan_sum(6, 3, small) == -2
    assert ramanujan_sum(5, 0, small) == 4
    assert all(ramanujan_sum(1, n, small) == 1 for n in range(-5, 20))


def test_csum_zero_modulus(small):
    with pytest.raises(InvalidArgumentError):
        ramanujan_sum(0, 3, small)


def test_holder_matches_divisor_sum_grid(small):
    for q in range(1, 501):
        row = ramanujan_sums(np.full(501, q), 0, small)  # warm the vector path too
        assert row[0] == small.phi[q]
        for n in range(0, 501):
            assert ramanujan_sum(q, n, small) == ramanujan_sum_holder(q, n, small)


def test_exponential_sum_oracle(small):
    for q in range(1, 201):
        for n in (0, 1, 2, 3, 6, 12, 30, 97, 210, q, 2 * q + 1):
            z = oracles.csum_exp(q, n)
            assert abs(z.imag) < 1e-9
            assert ramanujan_sum(q, n, small) == round(z.real)


def test_csum_bounded_by_gcd(small):
    for q in range(1, 300):
        for n in range(1, 300):
            assert abs(ramanujan_sum(q, n, small)) <= math.gcd(n, q)


def test_phi_of_product_bound(tables):
    a = np.arange(1, 301)
    for b in range(1, 301):
        assert np.all(tables.phi[a * b] <= a * tables.phi[b])


def test_divisor_identity(small):
    for m in range(1, 301):
        ds = small.divisors(m)
        for n in range(1, 301):
            lhs = sum(ramanujan_sum(q, n, small) for q in ds)
            assert lhs == (m if n % m == 0 else 0)


def test_negative_arguments_reduce(small):
    for q in range(1, 60):
        for n in range(-80, 0):
            assert ramanujan_sum(q, n, small) == ramanujan_sum(q, n % q, small)


def test_vector_forms_agree(small):
    qs = np.arange(1, 300)
    for n in (0, 1, 7, 12, -5, 720):
        v = ramanujan_sums(qs, n, small)
        assert v.tolist() == [ramanujan_sum(int(q), n, small) for q in qs]
    ns = np.arange(-20, 100)
    assert ramanujan_row(12, ns, small).tolist() == [ramanujan_sum(12, int(n), small) for n in ns]
    assert ramanujan_period(10, small).tolist() == [ramanujan_sum(10, n, small) for n in range(10)]
    M = ramanujan_matrix(15, ns, small)
    assert M.shape == (15, ns.size)
    assert M[8].tolist() == ramanujan_row(9, ns, small).tolist()


def test_primorial(small):
    assert primorial(1, small) == 1
    assert primorial(3, small) == 6
    assert primorial(10, small) == 210
    big = primorial(60, small)
    assert big == math.prod(p for p in range(2, 61) if oracles.factor(p) == {p: 1})
    assert big > 2**64


def test_divisor_count(small):
    assert divisor_count(1, small) == 1
    assert divisor_count(12, small) == 6
    assert divisor_count(997, small) == 2
    for n in range(1, 500):
        assert divisor_count(n, small) == len(oracles.divisors(n))
    with pytest.raises(InvalidArgumentError):
        divisor_count(10**7, small)


def test_scalar_helpers(small):
    assert euler_phi(36, small) == 12
    assert moebius(30, small) == -1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5000), st.integers(-10**9, 10**9))
def test_csum_properties(q, n):
    t = _T
    c = ramanujan_sum(q, n, t)
    assert c == ramanujan_sum_holder(q, n, t)
    assert c == ramanujan_sum(q, n + 7 * q, t)
    if n % q == 0:
        assert c == t.phi[q]
    elif n != 0:
        assert abs(c) <= math.gcd(abs(n), q)

