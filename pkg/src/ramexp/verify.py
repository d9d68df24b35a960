"""Seeded verification suites for the exact identities.

Every suite draws its random corpus from ``default_rng((seed, crc32(name)))``
so a suite gives the same cases whether it runs alone or inside ``all``.
Errors are relative, |lhs - rhs| / (1 + |rhs|); integer identities must have
error exactly 0.
"""
from __future__ import annotations

import json
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core_arith import (
    SieveTables,
    divisor_count,
    ramanujan_sum,
    ramanujan_sum_holder,
    ramanujan_sums,
    shared_tables,
)
from .correlation import (
    correlate_direct,
    correlate_via_divisors,
    fmt,
    singular_sum_coefficient_form,
    singular_sum_eratosthenes_form,
)
from .errors import InvalidArgumentError, NotFoundError
from .expansion import (
    TruncatedDivisorSum,
    finite_ramanujan_coefficients,
    invert_coefficients,
    reconstruct_many,
)
from .shift_expansion import orthogonality_check
from .sieve import (
    SieveFunction,
    ap_main_term_identity,
    coprime_sum,
    dyadic_csum_bound_check,
    fre_correlation_formula,
    make_gsifted,
    twisted_mobius_identity,
)

TOLERANCE = 1e-9
TABLES_LIMIT = 10**5
DEFAULT_CASES = 100
DEFAULT_QMAX = 40


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    max_err: float = 0.0
    exact: bool = False
    failure: dict | None = None
    replay: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure is None

    def record(self, err: float, case: dict) -> None:
        self.cases += 1
        err = float(err)
        if err > self.max_err or math.isnan(err):
            self.max_err = err
        bad = err != 0 if self.exact else not err < TOLERANCE
        if bad and self.failure is None:
            self.failure = {**case, "err": err}

    def lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        out = [f"{status} cases={self.cases} max_err={fmt(self.max_err)} suite={self.name}"]
        if self.failure is not None:
            out.append("case " + json.dumps(_plain(self.failure), sort_keys=True))
            args = " ".join(f"--{k} {v}" for k, v in sorted(self.replay.items()))
            out.append(f"replay: verify {self.name} {args}")
        return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def rel_err(a, b) -> float:
    return abs(complex(a) - complex(b)) / (1 + abs(complex(b)))


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng((int(seed), zlib.crc32(name.encode())))


def random_tds(rng: np.random.Generator, Dmax: int, density: float = 1.0) -> TruncatedDivisorSum:
    """Integer coefficients in [-9, 9] with a nonzero last entry."""
    D = int(rng.integers(1, Dmax + 1))
    c = rng.integers(-9, 10, size=D).astype(float)
    if density < 1:
        c[rng.random(D) > density] = 0
    c[-1] = rng.choice([-1, 1]) * int(rng.integers(1, 10))
    return TruncatedDivisorSum(c)


# ------------------------------------------------------------------ suites

def suite_holder(rng, cases, t, **_):
    r = SuiteResult("holder", exact=True)
    for _ in range(cases):
        q, n = int(rng.integers(1, 501)), int(rng.integers(-500, 501))
        a, b = ramanujan_sum(q, n, t), ramanujan_sum_holder(q, n, t)
        r.record(abs(a - b), {"q": q, "n": n, "divisor_sum": a, "holder": b})
    return r


def suite_exp_sum(rng, cases, t, **_):
    r = SuiteResult("exp-sum")
    for _ in range(cases):
        q, n = int(rng.integers(1, 201)), int(rng.integers(0, 1001))
        a = np.arange(1, q + 1)
        a = a[np.gcd(a, q) == 1]
        z = np.exp(2j * np.pi * ((a * n) % q) / q).sum()
        c = ramanujan_sum(q, n, t)
        r.record(max(rel_err(z.real, c), abs(z.imag)), {"q": q, "n": n, "value": c})
    return r


def suite_phi_bound(rng, cases, t, **_):
    """phi(ab) <= a phi(b)."""
    r = SuiteResult("lemma-a0", exact=True)
    for _ in range(cases):
        a, b = int(rng.integers(1, 301)), int(rng.integers(1, 301))
        lhs, rhs = int(t.phi[a * b]), a * int(t.phi[b])
        r.record(max(0, lhs - rhs), {"a": a, "b": b, "phi_ab": lhs, "a_phi_b": rhs})
    return r


def suite_gcd_bound(rng, cases, t, **_):
    """|c_q(n)| <= (n, q) for n >= 1."""
    r = SuiteResult("lemma-a1", exact=True)
    for _ in range(cases):
        q, n = int(rng.integers(1, t.limit + 1)), int(rng.integers(1, 10**6))
        c, g = ramanujan_sum(q, n, t), math.gcd(q, n)
        r.record(max(0, abs(c) - g), {"q": q, "n": n, "c": c, "gcd": g})
    return r


def suite_divisor_identity(rng, cases, t, **_):
    """sum_{q | m} c_q(n) = m [m | n]."""
    r = SuiteResult("divisor-identity", exact=True)
    for _ in range(cases):
        m, n = int(rng.integers(1, 301)), int(rng.integers(1, 301))
        lhs = sum(ramanujan_sum(q, n, t) for q in t.divisors(m))
        rhs = m if n % m == 0 else 0
        r.record(abs(lhs - rhs), {"m": m, "n": n, "lhs": lhs, "rhs": rhs})
    return r


def suite_reconstruction(rng, cases, t, **_):
    """sum_q fhat(q) c_q(n) against the divisor sum, random n <= 5000."""
    r = SuiteResult("reconstruction")
    for _ in range(cases):
        tds = random_tds(rng, 300)
        rc = finite_ramanujan_coefficients(tds)
        ns = rng.integers(1, 5001, size=32)
        rec = reconstruct_many(rc, ns, t)
        direct = tds.values(int(ns.max()))[ns - 1]
        errs = np.abs(rec - direct) / (1 + np.abs(direct))
        i = int(np.argmax(errs))
        r.record(errs[i], {"D": tds.truncation, "n": int(ns[i]),
                           "fprime": tds.coefficients.real.tolist()})
    return r


def suite_inversion(rng, cases, t, **_):
    r = SuiteResult("inversion")
    for _ in range(cases):
        tds = random_tds(rng, 2000)
        back = invert_coefficients(finite_ramanujan_coefficients(tds), t)
        scale = np.max(np.abs(tds.coefficients))
        err = np.max(np.abs(back.coefficients - tds.coefficients)) / scale
        r.record(err, {"D": tds.truncation, "fprime": tds.coefficients.real.tolist()})
    return r


def suite_high_coeff(rng, cases, t, **_):
    """q fhat(q) = f'(q) on (D/2, D]."""
    r = SuiteResult("high-coeff")
    for _ in range(cases):
        tds = random_tds(rng, 2000)
        D = tds.truncation
        hat = finite_ramanujan_coefficients(tds).coefficients
        q = np.arange(D // 2 + 1, D + 1)
        fp = tds.coefficients[q - 1]
        err = np.max(np.abs(hat[q - 1] * q - fp) / (1 + np.abs(fp)))
        r.record(err, {"D": D, "fprime": tds.coefficients.real.tolist()})
    return r


def suite_singular_forms(rng, cases, t, **_):
    """Coefficient form of the singular sum against the divisor form."""
    r = SuiteResult("lemma-a6")
    for i in range(cases):
        f, g = random_tds(rng, 120), random_tds(rng, 120)
        h = 0 if i % 10 == 0 else int(rng.integers(1, 200))
        a = singular_sum_coefficient_form(finite_ramanujan_coefficients(f),
                                          finite_ramanujan_coefficients(g), h, t).value
        b = singular_sum_eratosthenes_form(f, g, h).value
        r.record(rel_err(a, b), {"h": h, "f": f.coefficients.real.tolist(),
                                 "g": g.coefficients.real.tolist()})
    return r


def suite_progression_identity(rng, cases, t, **_):
    """sum_{(d,t)|a} f'(d)(d,t)/d = sum_{k|t} fhat(k) c_k(a)."""
    r = SuiteResult("lemma-a2")
    for _ in range(cases):
        f = SieveFunction(random_tds(rng, 500))
        tt = int(rng.integers(1, 61))
        a = int(rng.integers(-tt, tt + 1))
        lhs, rhs = ap_main_term_identity(f, tt, a, t)
        r.record(rel_err(lhs, rhs), {"t": tt, "a": a, "fprime": f.coefficients.real.tolist()})
    return r


def suite_twisted_identity(rng, cases, t, **_):
    """sum_{t | l} mu(l/t) sum_{k | t} fhat(k) c_k(a) = fhat(l) c_l(a)."""
    r = SuiteResult("lemma-a3")
    for _ in range(cases):
        f = SieveFunction(random_tds(rng, 200))
        ell, a = int(rng.integers(1, 61)), int(rng.integers(0, 61))
        lhs, rhs = twisted_mobius_identity(f, ell, a, t)
        r.record(rel_err(lhs, rhs), {"l": ell, "a": a, "fprime": f.coefficients.real.tolist()})
    return r


def suite_coprime_identity(rng, cases, t, **_):
    """Moebius expansion of the coprime sum, and the coprimality dichotomy
    (d, t) | a with 0 < |a| <= G forces (d, t) = 1 on sifted supports."""
    r = SuiteResult("lemma-a5")
    for _ in range(cases):
        G = int(rng.choice([2, 3, 5, 7, 11]))
        Q = int(rng.integers(G + 2, 400))
        coeffs = rng.integers(-9, 10, size=Q).astype(float)
        coeffs[0] = 1
        g = make_gsifted(coeffs, Q, G, t)
        primes = [int(p) for p in t.primes(200) if p > G]
        q = math.prod(int(p) for p in rng.choice(primes, size=int(rng.integers(0, 3)),
                                                 replace=False))
        N = int(rng.integers(1, 3000))
        cs = coprime_sum(g, N, q, G, t)
        err = rel_err(cs.mobius_expansion, cs.restricted)
        supp = np.array(g.support())
        a = int(rng.integers(1, G + 1)) * int(rng.choice([-1, 1]))
        gg = np.gcd.outer(supp, supp)
        hit = (a % gg == 0) & (gg != 1)
        if hit.any():
            err = max(err, 1.0)
        r.record(err, {"G": G, "Q": Q, "q": q, "N": N, "a": a,
                       "fprime": coeffs.tolist()})
    return r


def suite_dyadic(rng, cases, t, **_):
    """sum_{A < q <= B} |c_q(h)| <= 2 B d(h)."""
    r = SuiteResult("dyadic", exact=True)
    for _ in range(cases):
        B = int(rng.integers(2, 5001))
        A = int(rng.integers(0, B))
        h = int(rng.integers(1, 5001))
        total = int(np.abs(ramanujan_sums(np.arange(A + 1, B + 1), h, t)).sum())
        bound = 2 * B * divisor_count(h, t)
        r.record(max(0, total - bound), {"A": A, "B": B, "h": h, "sum": total, "bound": bound})
    dyadic_csum_bound_check(0, 10, 6, t)
    return r


def suite_orthogonality(rng, cases, t, qmax=DEFAULT_QMAX, **_):
    """(1/x) sum_{h <= x} c_q(n+h) c_l(h) = [q = l] c_l(n) at x = lcm(q, l)."""
    r = SuiteResult("orthogonality", exact=True)
    for q in range(1, qmax + 1):
        for ell in range(1, qmax + 1):
            n = int(rng.integers(0, 1000))
            rep = orthogonality_check(q, ell, math.lcm(q, ell), t, n=n)
            r.record(abs(rep.total - rep.expected * rep.x), {"q": q, "l": ell, "n": n})
    return r


def suite_correlation_methods(rng, cases, t, **_):
    """Direct correlation against CRT counting and the coefficient route."""
    r = SuiteResult("correlation-methods")
    for i in range(cases):
        f, g = random_tds(rng, 30, 0.5), random_tds(rng, 30, 0.5)
        N, h = int(rng.integers(1, 2001)), int(rng.integers(0, 51))
        a = correlate_direct(f, g, N, h)
        b = correlate_via_divisors(f, g, N, h)
        err = rel_err(b, a)
        if i % 4 == 0 and N >= 2:
            c = fre_correlation_formula(SieveFunction(f), SieveFunction(g), N, h, t).value
            err = max(err, rel_err(c, a))
        r.record(err, {"N": N, "h": h, "f": f.coefficients.real.tolist(),
                       "g": g.coefficients.real.tolist()})
    return r


SUITES = {
    "holder": suite_holder,
    "exp-sum": suite_exp_sum,
    "lemma-a0": suite_phi_bound,
    "lemma-a1": suite_gcd_bound,
    "divisor-identity": suite_divisor_identity,
    "reconstruction": suite_reconstruction,
    "inversion": suite_inversion,
    "high-coeff": suite_high_coeff,
    "lemma-a6": suite_singular_forms,
    "lemma-a2": suite_progression_identity,
    "lemma-a3": suite_twisted_identity,
    "lemma-a5": suite_coprime_identity,
    "dyadic": suite_dyadic,
    "orthogonality": suite_orthogonality,
    "correlation-methods": suite_correlation_methods,
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def verify_suite(name: str, seed: int = 0, cases: int = DEFAULT_CASES,
                 tables: SieveTables | None = None, qmax: int = DEFAULT_QMAX,
                 threads: int = 1) -> list[SuiteResult]:
    """Run one named suite, or every suite for ``all``; results in suite order."""
    if name not in SUITE_NAMES:
        raise NotFoundError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    if cases < 1:
        raise InvalidArgumentError("cases must be >= 1")
    t = tables or shared_tables(TABLES_LIMIT)
    names = list(SUITES) if name == "all" else [name]

    def one(n):
        res = SUITES[n](_rng(seed, n), cases, t, qmax=qmax)
        res.replay = {"seed": seed, "cases": cases}
        if n == "orthogonality":
            res.replay["qmax"] = qmax
        return res

    if threads == 1:
        return [one(n) for n in names]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(one, names))


def report(results: list[SuiteResult]) -> str:
    return "".join(line + "\n" for r in results for line in r.lines())
