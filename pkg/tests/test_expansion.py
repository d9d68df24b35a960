import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ramexp.core_arith import build_tables, ramanujan_matrix
from ramexp.errors import InvalidArgumentError, NotFoundError, VerificationError
from ramexp.expansion import (
    ArithmeticFunction,
    RamanujanCoefficients,
    TruncatedDivisorSum,
    builtin_catalog,
    classical_coefficient_sigma,
    close,
    csum,
    eratosthenes_transform,
    evaluate_truncated,
    finite_ramanujan_coefficients,
    invert_coefficients,
    load_custom,
    lookup,
    reconstruct,
    reconstruct_many,
    zeta,
)

_T = build_tables(5000)


def test_transform_of_one(small):
    tds = eratosthenes_transform(lookup("one", small), 12, small)
    assert tds.coefficients.tolist() == [1] + [0] * 11


def test_transform_of_mangoldt(small):
    tds = eratosthenes_transform(lookup("mangoldt", small), 300, small)
    for d in range(1, 301):
        assert close(tds.prime(d), -oracles.mu(d) * math.log(d))


def test_transform_of_sigma(small):
    tds = eratosthenes_transform(lookup("sigma", small, s=1), 200, small)
    assert np.allclose(tds.coefficients, 1 / np.arange(1, 201), rtol=0, atol=1e-15)


def test_transform_without_rule_is_convolution(small):
    f = ArithmeticFunction("sq", lambda n: float(n * n))
    tds = eratosthenes_transform(f, 60, small)
    for d in range(1, 61):
        ref = sum(oracles.mu(d // e) * e * e for e in oracles.divisors(d))
        assert tds.prime(d) == ref


def test_wrong_rule_is_caught(small):
    f = ArithmeticFunction("bad", lambda n: 1.0, transform_rule=lambda d: np.ones(d.size))
    with pytest.raises(VerificationError):
        eratosthenes_transform(f, 100, small)


def test_domain_overflow(small):
    f = ArithmeticFunction("short", lambda n: 1.0, domain_limit=10)
    with pytest.raises(InvalidArgumentError):
        eratosthenes_transform(f, 11, small)
    with pytest.raises(InvalidArgumentError):
        eratosthenes_transform(lookup("one", small), 10**6, small)


def test_evaluate_examples(small):
    assert evaluate_truncated(TruncatedDivisorSum([1, 0.5]), 4) == 1.5
    tds = TruncatedDivisorSum([3.25, 7, -1])
    assert evaluate_truncated(tds, 1) == 3.25
    lam = eratosthenes_transform(lookup("mangoldt", small), 10, small)
    assert abs(evaluate_truncated(lam, 6)) < 1e-15


def test_evaluate_matches_values():
    tds = TruncatedDivisorSum(np.arange(1, 40) % 7 - 3.0)
    vals = tds.values(500)
    for n in range(1, 501):
        assert close(vals[n - 1], evaluate_truncated(tds, n))
        assert close(vals[n - 1], oracles.eval_tds(tds.coefficients.real, n))


def test_coefficients_example():
    rc = finite_ramanujan_coefficients(TruncatedDivisorSum([1, 1]))
    assert rc.coefficients.tolist() == [1.5, 0.5]
    assert rc.range == 2
    assert rc[3] == 0


def test_coefficients_match_exact_rationals():
    rng = np.random.default_rng(3)
    for _ in range(20):
        c = rng.integers(-9, 10, size=int(rng.integers(1, 80)))
        rc = finite_ramanujan_coefficients(TruncatedDivisorSum(c.astype(float)))
        exact = oracles.hat_fractions(c)
        assert np.allclose(rc.coefficients, [float(x) for x in exact], rtol=1e-13, atol=1e-13)


def test_sigma_coefficient_formula(small):
    D, s = 500, 1.0
    rc = finite_ramanujan_coefficients(eratosthenes_transform(lookup("sigma", small, s=s), D, small))
    for q in range(1, D + 1):
        n = np.arange(1, D // q + 1, dtype=float)
        assert close(rc[q], q ** (-s - 1) * math.fsum(n ** (-s - 1)))


def test_high_index_law():
    rng = np.random.default_rng(4)
    for _ in range(50):
        c = rng.integers(-9, 10, size=int(rng.integers(1, 1500))).astype(float)
        rc = finite_ramanujan_coefficients(TruncatedDivisorSum(c))
        D = c.size
        q = np.arange(D // 2 + 1, D + 1)
        assert np.array_equal(rc.coefficients[q - 1], c[q - 1] / q)


def test_invert_examples(small):
    back = invert_coefficients(RamanujanCoefficients([1.5, 0.5]), small)
    assert back.coefficients.tolist() == [1, 1]
    top = invert_coefficients(RamanujanCoefficients([0, 0, 0, 0, 0, 2.0]), small)
    assert top.prime(6) == 12
    for d in range(1, 6):
        assert top.prime(d) == d * oracles.mu(6 // d) * 2.0 * (6 % d == 0)


def test_invert_builds_tables_when_missing():
    back = invert_coefficients(RamanujanCoefficients([1.5, 0.5]))
    assert back.coefficients.tolist() == [1, 1]


def test_mangoldt_round_trip(small):
    lam = eratosthenes_transform(lookup("mangoldt", small), 100, small)
    back = invert_coefficients(finite_ramanujan_coefficients(lam), small)
    ref = np.array([-oracles.mu(d) * math.log(d) for d in range(1, 101)])
    assert np.max(np.abs(back.coefficients - ref)) < 1e-9


def test_reconstruct_examples(small):
    rc = finite_ramanujan_coefficients(TruncatedDivisorSum([1, 1]))
    assert reconstruct(rc, 3, small) == 1
    rng = np.random.default_rng(5)
    c = rng.normal(size=40)
    rc = finite_ramanujan_coefficients(TruncatedDivisorSum(c))
    assert close(reconstruct(rc, 1, small), c[0])
    lam = finite_ramanujan_coefficients(eratosthenes_transform(lookup("mangoldt", small), 50, small))
    assert close(reconstruct(lam, 7, small), math.log(7))


def test_duality_corpus(small):
    """200 integer transforms with D <= 2000: inversion round trip and
    reconstruction at every n <= 5000."""
    rng = np.random.default_rng(20170301)
    ns = np.arange(1, 5001)
    M = ramanujan_matrix(2000, ns, small).astype(float)
    worst_inv = worst_rec = 0.0
    for _ in range(200):
        c = rng.integers(-9, 10, size=int(rng.integers(1, 2001))).astype(float)
        tds = TruncatedDivisorSum(c)
        rc = finite_ramanujan_coefficients(tds)
        back = invert_coefficients(rc, small)
        worst_inv = max(worst_inv, np.max(np.abs(back.coefficients - c)))
        rec = rc.coefficients.real @ M[:c.size]
        direct = tds.values(5000).real
        worst_rec = max(worst_rec, np.max(np.abs(rec - direct) / (1 + np.abs(direct))))
    assert worst_inv < 1e-9
    assert worst_rec < 1e-9


def test_reconstruct_many_matches_scalar(small):
    rc = finite_ramanujan_coefficients(TruncatedDivisorSum(np.linspace(-1, 1, 77)))
    ns = np.arange(1, 400)
    many = reconstruct_many(rc, ns, small, chunk=1000)
    assert np.allclose(many, [reconstruct(rc, int(n), small) for n in ns], rtol=1e-12, atol=1e-12)


def test_zeta_against_series():
    assert abs(zeta(2) - oracles.zeta_series(2)) < 1e-12
    assert abs(zeta(1.5) - oracles.zeta_series(1.5)) < 1e-10
    with pytest.raises(InvalidArgumentError):
        zeta(1)


def test_classical_sigma_coefficient():
    z2 = oracles.zeta_series(2)
    assert abs(classical_coefficient_sigma(1, 1) - z2) < 1e-12
    assert abs(classical_coefficient_sigma(1, 1) - 1.644934) < 1e-6
    assert abs(classical_coefficient_sigma(2, 1) - z2 / 4) < 1e-12
    with pytest.raises(InvalidArgumentError):
        classical_coefficient_sigma(1, 0)
    with pytest.raises(InvalidArgumentError):
        classical_coefficient_sigma(1, -0.5)


def test_sigma_ratio_tends_to_one(small):
    errs = []
    for D in (100, 1000):
        rc = finite_ramanujan_coefficients(
            eratosthenes_transform(lookup("sigma", small, s=1), D, small))
        errs.append(max(abs(rc[q].real / classical_coefficient_sigma(q, 1) - 1)
                        for q in range(1, math.isqrt(D) + 1)))
    assert errs[1] < errs[0]


def test_catalog_lookup(small):
    lam = lookup("mangoldt", small)
    assert lam(8) == math.log(2) and lam(12) == 0 and lam(1) == 0
    assert lookup("one", small)(99) == 1
    assert close(lookup("sigma", small, s=1)(6), 2.0)
    assert close(lookup("prod_minus", small, s=1)(6), 1 / 3)
    assert close(lookup("prod_plus", small, s=1)(12), 1.5 * 4 / 3)
    with pytest.raises(NotFoundError):
        lookup("nope", small)


def test_catalog_tabulation_matches_evaluator(small):
    for f in builtin_catalog(small):
        vals = f.values(300)
        assert np.allclose(vals, [f(n) for n in range(1, 301)], rtol=1e-13, atol=1e-13), f.name


def test_catalog_transforms(small):
    names = [f.name for f in builtin_catalog(small)]
    assert names == ["one", "mangoldt", "sigma", "prod_minus", "prod_plus", "block"]
    for f in builtin_catalog(small):
        tds = eratosthenes_transform(f, 400, small)
        vals = f.values(400)
        assert np.allclose(tds.values(400), vals, rtol=1e-12, atol=1e-12), f.name


def test_prod_transforms(small):
    d = np.arange(1, 200)
    pm = lookup("prod_minus", small, s=0.5).transform(d)
    pp = lookup("prod_plus", small, s=0.5).transform(d)
    mu = np.array([oracles.mu(int(x)) for x in d])
    assert np.allclose(pm, mu * d ** -0.5)
    assert np.allclose(pp, mu * mu * d ** -0.5)


def test_custom_transform_file(tmp_path, small):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"name": "pair", "transform": [[1, 0], [1, 0]]}))
    f = load_custom(p, small)
    assert f.name == "pair"
    assert [f(n) for n in range(1, 5)] == [1, 2, 1, 2]
    tds = eratosthenes_transform(f, 6, small)
    assert tds.coefficients.tolist() == [1, 1, 0, 0, 0, 0]


def test_custom_values_file(tmp_path, small):
    p = tmp_path / "g.json"
    vals = [1.0 + (n % 2 == 0) for n in range(1, 31)]
    p.write_text(json.dumps({"name": "vals", "values": vals}))
    f = lookup("file", small, path=str(p))
    tds = eratosthenes_transform(f, 30, small)
    assert np.allclose(tds.coefficients, [1, 1] + [0] * 28)
    with pytest.raises(InvalidArgumentError):
        eratosthenes_transform(f, 31, small)


def test_custom_file_errors(tmp_path, small):
    p = tmp_path / "h.json"
    p.write_text(json.dumps({"name": "x"}))
    with pytest.raises(InvalidArgumentError):
        load_custom(p, small)
    with pytest.raises(InvalidArgumentError):
        lookup("file", small)


def test_csum_is_correctly_rounded():
    vals = [1e16, 1.0, -1e16, 1.0]
    assert csum(vals) == 2.0
    assert csum(np.array([1e16 + 0j, 1j, -1e16 + 0j])) == 1j


def test_tds_validation():
    with pytest.raises(InvalidArgumentError):
        TruncatedDivisorSum([])
    tds = TruncatedDivisorSum([0, 2, 0, 5])
    assert tds.support().tolist() == [2, 4]
    assert tds.D == 4
    with pytest.raises(ValueError):
        tds.coefficients[0] = 1


coeff_lists = st.lists(st.integers(-9, 9), min_size=1, max_size=120)


@settings(max_examples=100, deadline=None)
@given(coeff_lists, st.integers(1, 5000))
def test_duality_property(c, n):
    tds = TruncatedDivisorSum(np.array(c, dtype=float))
    rc = finite_ramanujan_coefficients(tds)
    back = invert_coefficients(rc, _T)
    assert np.max(np.abs(back.coefficients - tds.coefficients)) <= 1e-9 * max(1, max(map(abs, c)))
    assert close(reconstruct(rc, n, _T), evaluate_truncated(tds, n))
