"""Sieve functions of range Q, G-sifted functions, sums in arithmetic
progressions and the finite-expansion route to correlations.

A sieve function of range Q is a truncated divisor sum whose transform is
essentially bounded and has f'(Q) != 0. It is G-sifted when f'(q) = 0 for
every q with a prime factor p <= G.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .core_arith import (
    SieveTables,
    divisor_count,
    is_coprime_to_primorial,
    primorial,
    ramanujan_period,
    ramanujan_row,
    ramanujan_sums,
)
from .correlation import (
    correlate_direct,
    fmt,
    singular_sum_coefficient_form,
)
from .errors import (
    DegenerateInputError,
    InvalidArgumentError,
    PreconditionError,
    VerificationError,
)
from .expansion import (
    RamanujanCoefficients,
    TruncatedDivisorSum,
    close,
    csum,
    finite_ramanujan_coefficients,
)

GROWTH_EXPONENT = 0.1
SIFT_SAMPLES = 32
SIFT_SEED = 31


@dataclass(frozen=True, eq=False)
class SieveFunction:
    """A truncated divisor sum normalised so that f'(Q) != 0.

    Trailing zero coefficients are dropped on construction, so ``range`` is
    the largest index in the support.
    """

    tds: TruncatedDivisorSum
    N: int | None = None

    def __post_init__(self):
        tds = self.tds
        if not isinstance(tds, TruncatedDivisorSum):
            tds = TruncatedDivisorSum(tds)
        support = tds.support()
        if support.size == 0:
            raise DegenerateInputError("sieve function with identically zero transform")
        Q = int(support[-1])
        if Q != tds.truncation:
            tds = TruncatedDivisorSum(tds.coefficients[:Q], tds.name)
        object.__setattr__(self, "tds", tds)

    @property
    def range(self) -> int:
        return self.tds.truncation

    @property
    def coefficients(self) -> np.ndarray:
        return self.tds.coefficients

    @cached_property
    def hat(self) -> RamanujanCoefficients:
        return finite_ramanujan_coefficients(self.tds)

    def level(self, N: int | None = None) -> float:
        """lambda(f) = log Q / log N."""
        N = self.N if N is None else N
        if N is None or N < 2:
            raise InvalidArgumentError("the level needs a context length N >= 2")
        return math.log(self.range) / math.log(N)

    @property
    def growth(self) -> float:
        """max_d |f'(d)| / d^0.1, a diagnostic for essential boundedness."""
        d = np.arange(1, self.range + 1)
        return float(np.max(np.abs(self.coefficients) / d**GROWTH_EXPONENT))

    def __call__(self, n: int) -> complex:
        return self.tds(n)

    def values(self, M: int) -> np.ndarray:
        return self.tds.values(M)


@dataclass(frozen=True, eq=False)
class GSiftedFunction:
    base: SieveFunction
    G: int

    @property
    def range(self) -> int:
        return self.base.range

    @property
    def hat(self) -> RamanujanCoefficients:
        return self.base.hat

    @property
    def tds(self) -> TruncatedDivisorSum:
        return self.base.tds

    def support(self) -> list[int]:
        return [int(d) for d in self.base.tds.support()]

    def __call__(self, n: int) -> complex:
        return self.base(n)

    def values(self, M: int) -> np.ndarray:
        return self.base.values(M)


def as_sieve(f) -> SieveFunction:
    if isinstance(f, SieveFunction):
        return f
    if isinstance(f, GSiftedFunction):
        return f.base
    return SieveFunction(f)


class Comparison(NamedTuple):
    direct: complex
    main: complex
    difference: complex


def _hat_at(f: SieveFunction, k: int) -> complex:
    return f.hat[k]


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def ap_main_term(f: SieveFunction, t: int, a: int, tables: SieveTables) -> complex:
    """sum_{k | t} fhat(k) c_k(a)."""
    ks = [k for k in _divisors(t) if k <= f.range]
    if not ks:
        return 0j
    c = ramanujan_sums(ks, a, tables)
    return csum(np.array([_hat_at(f, k) for k in ks]) * c)


def ap_sum(f, N: int, a: int, t: int, tables: SieveTables) -> Comparison:
    """sum_{n <= N, n = a (mod t)} f(n) against (N/t) sum_{k|t} fhat(k) c_k(a)."""
    f = as_sieve(f)
    if t < 1:
        raise InvalidArgumentError("modulus t must be >= 1")
    r = a % t
    fv = f.values(N)
    start = r if r >= 1 else t
    direct = csum(fv[start - 1::t]) if start <= N else 0j
    main = N / t * ap_main_term(f, t, r, tables)
    return Comparison(direct, main, direct - main)


def ap_main_term_identity(f, t: int, a: int, tables: SieveTables):
    """Both sides of sum_{d<=D, (d,t)|a} f'(d)(d,t)/d = sum_{k|t} fhat(k) c_k(a)."""
    f = as_sieve(f)
    if t < 1:
        raise InvalidArgumentError("modulus t must be >= 1")
    ds = f.tds.support()
    g = np.gcd(ds, t)
    keep = np.mod(a, g) == 0
    c = f.coefficients[ds[keep] - 1]
    lhs = csum(c * g[keep] / ds[keep])
    return lhs, ap_main_term(f, t, a, tables)


def twisted_sum(f, N: int, ell: int, a: int, tables: SieveTables) -> Comparison:
    """sum_{n <= N} f(n) c_l(n - a) against fhat(l) c_l(a) N."""
    f = as_sieve(f)
    if ell < 1:
        raise InvalidArgumentError("l must be >= 1")
    fv = f.values(N)
    direct = csum(fv * ramanujan_row(ell, np.arange(1, N + 1) - a, tables))
    main = _hat_at(f, ell) * int(ramanujan_period(ell, tables)[a % ell]) * N
    return Comparison(direct, main, direct - main)


def twisted_mobius_identity(f, ell: int, a: int, tables: SieveTables):
    """Both sides of sum_{t|l} mu(l/t) sum_{k|t} fhat(k) c_k(a) = fhat(l) c_l(a)."""
    f = as_sieve(f)
    mu = tables.mu
    parts = [int(mu[ell // t]) * ap_main_term(f, t, a, tables)
             for t in _divisors(ell) if mu[ell // t]]
    lhs = csum(parts) if parts else 0j
    rhs = _hat_at(f, ell) * int(ramanujan_period(ell, tables)[a % ell])
    return lhs, rhs


def _transform_values(rule, Q: int) -> np.ndarray:
    if isinstance(rule, TruncatedDivisorSum):
        out = np.zeros(Q, dtype=complex)
        m = min(Q, rule.truncation)
        out[:m] = rule.coefficients[:m]
        return out
    if callable(rule):
        return np.asarray(rule(np.arange(1, Q + 1)), dtype=complex)
    arr = np.zeros(Q, dtype=complex)
    vals = np.asarray(rule, dtype=complex)[:Q]
    arr[:vals.size] = vals
    return arr


def make_gsifted(fprime_rule, Q: int, G: int, tables: SieveTables,
                 N: int | None = None) -> GSiftedFunction:
    """Zero f'(q) for every q <= Q with a prime factor <= G and verify the
    resulting expansion shape.

    ``fprime_rule`` is a vectorized callable d -> f'(d), an array of
    f'(1..), or a TruncatedDivisorSum.
    """
    if G < 2:
        raise InvalidArgumentError("G must be >= 2")
    tables.check(Q, "Q")
    coeffs = _transform_values(fprime_rule, Q)
    qs = np.arange(1, Q + 1)
    small = (qs > 1) & (tables.spf[qs] <= G)
    coeffs[small] = 0
    if not np.any(coeffs):
        raise DegenerateInputError(f"no coefficient survives sifting up to G={G}")
    f = GSiftedFunction(SieveFunction(TruncatedDivisorSum(coeffs, "gsifted"), N), G)

    hat = f.hat.coefficients
    R = f.range
    bad = np.flatnonzero(small[:R] & (hat != 0))
    if bad.size:
        raise VerificationError("sifted expansion has a coefficient at a small-prime index",
                                case={"q": int(bad[0] + 1), "G": G})
    P = primorial(G, tables)
    rng = np.random.default_rng(SIFT_SEED)
    for n in rng.integers(1, 10 * R + 1, size=SIFT_SAMPLES):
        n = int(n)
        m = n // math.gcd(n, P)
        if not close(f(n), f(m)):
            raise VerificationError("f(n) != f(n / (n, P(G)))", case={"n": n, "G": G})
    return f


class CoprimeSum(NamedTuple):
    restricted: complex
    unrestricted: complex
    difference: complex
    mobius_expansion: complex


def _require_sifted_modulus(q: int, G: int, tables: SieveTables) -> None:
    if q < 1:
        raise InvalidArgumentError("q must be >= 1")
    if not is_coprime_to_primorial(q, G, tables):
        raise PreconditionError(f"q={q} has a prime factor <= G={G}")


def coprime_sum(f, N: int, q: int, G: int, tables: SieveTables) -> CoprimeSum:
    """sum_{n <= N, (n,q)=1} f(n) against the unrestricted sum, plus the
    Moebius expansion sum_{d|q} mu(d) sum_{m <= N/d} f(dm)."""
    f = as_sieve(f)
    _require_sifted_modulus(q, G, tables)
    fv = f.values(N)
    ns = np.arange(1, N + 1)
    restricted = csum(fv[np.gcd(ns, q) == 1])
    unrestricted = csum(fv)
    parts = [int(tables.mu[d]) * csum(fv[d - 1::d])
             for d in _divisors(q) if d <= N and tables.mu[d]]
    mob = csum(parts) if parts else 0j
    return CoprimeSum(restricted, unrestricted, restricted - unrestricted, mob)


def coprime_correlation(f, g: GSiftedFunction, N: int, h: int, q: int,
                        tables: SieveTables) -> Comparison:
    """sum_{n <= N, (n,q)=1} f(n) g(n+h) against fhat(1) ghat(1) N.

    Requires 1 <= h <= G and (q, P(G)) = 1.
    """
    f = as_sieve(f)
    if not isinstance(g, GSiftedFunction):
        raise InvalidArgumentError("g must be a GSiftedFunction")
    G = g.G
    if not 1 <= h <= G:
        raise PreconditionError(f"shift h={h} outside 1..G={G}")
    _require_sifted_modulus(q, G, tables)
    fv = f.values(N)
    gv = g.values(N + h)[h:]
    keep = np.gcd(np.arange(1, N + 1), q) == 1
    direct = csum(fv[keep] * gv[keep])
    main = f.hat[1] * g.hat[1] * N
    return Comparison(direct, main, direct - main)


def sifted_singular_collapse(f, g: GSiftedFunction, h: int, tables: SieveTables):
    """fhat(1) ghat(1) + sum_{G < l <= Q} fhat(l) ghat(l) c_l(h), next to the
    full coefficient-form singular sum; the two agree exactly."""
    f = as_sieve(f)
    R = min(f.range, g.range)
    ls = np.arange(g.G + 1, R + 1)
    tail = 0j
    if ls.size:
        tail = csum(f.hat.coefficients[ls - 1] * g.hat.coefficients[ls - 1]
                    * ramanujan_sums(ls, h, tables))
    collapsed = f.hat[1] * g.hat[1] + tail
    full = singular_sum_coefficient_form(f.hat, g.hat, h, tables).value
    return collapsed, full


def dyadic_csum_bound_check(A: int, B: int, h: int, tables: SieveTables):
    """sum_{A < q <= B} |c_q(h)| and the bound 2 B d(h); raises if violated."""
    if not 0 <= A < B:
        raise InvalidArgumentError("need 0 <= A < B")
    if h < 1:
        raise InvalidArgumentError("h must be >= 1")
    total = int(np.abs(ramanujan_sums(np.arange(A + 1, B + 1), h, tables)).sum())
    bound = 2 * B * divisor_count(h, tables)
    if total > bound:
        raise VerificationError("dyadic bound violated",
                                case={"A": A, "B": B, "h": h, "sum": total, "bound": bound})
    return total, bound


def ramanujan_pair_sum(d: int, q: int, N: int, h: int, tables: SieveTables,
                       _cache: dict | None = None) -> int:
    """sum_{n <= N} c_d(n) c_q(n + h), exactly, by reduction mod lcm(d, q)."""
    L = math.lcm(d, q)
    if _cache is not None and d in _cache:
        cd = _cache[d]
    else:
        cd = ramanujan_period(d, tables)
    cq = _cache[q] if _cache is not None and q in _cache else ramanujan_period(q, tables)
    n = np.arange(1, min(L, N) + 1)
    prod = cd[n % d] * cq[(n + h) % q]
    if N <= L:
        return int(prod.sum())
    full, rem = divmod(N, L)
    return full * int(prod.sum()) + int(prod[:rem].sum())


class FreResult(NamedTuple):
    value: complex
    direct: complex
    singular_main: complex
    residual: complex
    level_sum: float
    in_regime: bool


def fre_correlation_formula(f, g, N: int, h: int, tables: SieveTables) -> FreResult:
    """C_{f,g}(N,h) = sum_d fhat(d) sum_q ghat(q) sum_{n<=N} c_d(n) c_q(n+h).

    Also returns the direct correlation, S(h) N, the residual C - S(h) N and
    the level sum lambda(f) + lambda(g) (< 1 is the proven regime).
    """
    f, g = as_sieve(f), as_sieve(g)
    if N < 2 or h < 0:
        raise InvalidArgumentError("need N >= 2 and h >= 0")
    fh, gh = f.hat.coefficients, g.hat.coefficients
    ds = np.flatnonzero(fh) + 1
    qs = np.flatnonzero(gh) + 1
    cache = {int(m): ramanujan_period(int(m), tables) for m in set(ds) | set(qs)}
    terms = [fh[d - 1] * gh[q - 1] * ramanujan_pair_sum(int(d), int(q), N, h, tables, cache)
             for d in ds for q in qs]
    value = csum(terms) if terms else 0j
    direct = correlate_direct(f, g, N, h)
    S = singular_sum_coefficient_form(f.hat, g.hat, h, tables).value
    lam = f.level(N) + g.level(N)
    return FreResult(value, direct, S * N, direct - S * N, lam, lam < 1)


def mean_value(f, x: int) -> complex:
    """(1/x) sum_{n <= x} f(n)."""
    return csum(as_sieve(f).values(x)) / x


EXPERIMENT_HEADER = "N,D,Q,h,value,main,residual,bound_scale"


def experiment_rows(rows) -> str:
    """CSV for (N, D, Q, h, value, main, residual, bound_scale) tuples; complex
    entries are written by their real part."""
    buf = io.StringIO()
    buf.write(EXPERIMENT_HEADER + "\n")
    for N, D, Q, h, value, main, residual, scale in rows:
        buf.write(",".join([str(N), str(D), str(Q), str(h), fmt(complex(value).real),
                            fmt(complex(main).real), fmt(complex(residual).real),
                            fmt(scale)]) + "\n")
    return buf.getvalue()
