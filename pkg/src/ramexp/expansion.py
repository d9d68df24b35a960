"""Eratosthenes transforms, truncated divisor sums and finite Ramanujan
expansions.

A function given through its transform f' = f * mu on 1..D,

    f(n) = sum_{d | n, d <= D} f'(d),

has the finite Ramanujan expansion f(n) = sum_{q <= D} fhat(q) c_q(n) with

    fhat(q) = sum_{m <= D, q | m} f'(m) / m,         (forward)
    f'(d)   = d * sum_{j <= D/d} mu(j) fhat(d j).     (inverse)

Everything here is double-precision complex.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import special

from .core_arith import SieveTables, build_tables, ramanujan_sums
from .errors import InvalidArgumentError, NotFoundError, VerificationError

CROSS_CHECK_SAMPLES = 32
CROSS_CHECK_SEED = 20170301
EXACT_RTOL = 1e-9


def close(a, b, tol=EXACT_RTOL) -> bool:
    """|a - b| <= tol * (1 + |b|), the tolerance used for exact identities."""
    return abs(a - b) <= tol * (1 + abs(b))


def csum(values) -> complex:
    """Correctly rounded sum of complex values (math.fsum per component)."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        im = arr.imag.ravel()
        return complex(math.fsum(arr.real.ravel()), math.fsum(im) if im.any() else 0.0)
    return complex(math.fsum(arr.ravel()), 0.0)


def divisors_upto(n: int, bound: int) -> list[int]:
    """Divisors d of n with d <= bound, ascending, by trial division."""
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return [d for d in small + large[::-1] if d <= bound]


@dataclass(frozen=True, eq=False)
class ArithmeticFunction:
    """A named map n -> complex.

    ``transform_rule`` (optional) gives f'(d) in closed form; it receives an
    int64 array of d values and returns an array. ``tabulator`` (optional)
    returns f(1..M) at once.
    """

    name: str
    evaluator: Callable[[int], complex]
    transform_rule: Callable[[np.ndarray], np.ndarray] | None = None
    domain_limit: int | None = None
    tabulator: Callable[[int], np.ndarray] | None = None
    params: dict = field(default_factory=dict)

    def _check(self, n: int) -> None:
        if n < 1 or (self.domain_limit is not None and n > self.domain_limit):
            raise InvalidArgumentError(
                f"{self.name}: n={n} outside domain [1, {self.domain_limit}]")

    def __call__(self, n: int) -> complex:
        self._check(int(n))
        return complex(self.evaluator(int(n)))

    def values(self, M: int) -> np.ndarray:
        """f(1), ..., f(M) as a complex array."""
        if M < 1:
            return np.zeros(0, dtype=complex)
        self._check(M)
        if self.tabulator is not None:
            return np.asarray(self.tabulator(M), dtype=complex)
        return np.array([self.evaluator(n) for n in range(1, M + 1)], dtype=complex)

    def transform(self, ds) -> np.ndarray:
        ds = np.asarray(ds, dtype=np.int64)
        return np.asarray(self.transform_rule(ds), dtype=complex)


@dataclass(frozen=True, eq=False)
class TruncatedDivisorSum:
    """f(n) = sum_{d | n, d <= D} f'(d); ``coefficients[d-1]`` is f'(d)."""

    coefficients: np.ndarray
    name: str = "tds"

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).ravel()
        if c.size == 0:
            raise InvalidArgumentError("a truncated divisor sum needs D >= 1")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def truncation(self) -> int:
        return self.coefficients.size

    D = truncation

    def prime(self, d: int) -> complex:
        return complex(self.coefficients[d - 1]) if 1 <= d <= self.truncation else 0j

    def support(self) -> np.ndarray:
        """Indices d with f'(d) != 0."""
        return np.flatnonzero(self.coefficients) + 1

    def __call__(self, n: int) -> complex:
        return evaluate_truncated(self, n)

    def values(self, M: int) -> np.ndarray:
        """f(1..M); divisors are accumulated in ascending order."""
        out = np.zeros(max(M, 0), dtype=complex)
        c = self.coefficients
        for d in self.support():
            if d > M:
                break
            out[d - 1::d] += c[d - 1]
        return out


@dataclass(frozen=True, eq=False)
class RamanujanCoefficients:
    """fhat(1..Q); ``coefficients[q-1]`` is fhat(q)."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).ravel()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def range(self) -> int:
        return self.coefficients.size

    def __getitem__(self, q: int) -> complex:
        return complex(self.coefficients[q - 1]) if 1 <= q <= self.range else 0j


def tabulate(f, M: int) -> np.ndarray:
    """f(1..M) for an ArithmeticFunction, TruncatedDivisorSum, array or callable."""
    if hasattr(f, "values"):
        return f.values(M)
    if isinstance(f, np.ndarray):
        if f.size < M:
            raise InvalidArgumentError(f"table holds {f.size} values, {M} needed")
        return f[:M].astype(complex)
    return np.array([f(n) for n in range(1, M + 1)], dtype=complex)


def mobius_transform_values(values: np.ndarray, tables: SieveTables) -> np.ndarray:
    """f'(d) = sum_{e | d} mu(d/e) f(e) for d <= len(values)."""
    D = values.size
    tables.check(D, "D")
    mu = tables.mu
    out = np.zeros(D, dtype=complex)
    for e in range(1, D + 1):
        v = values[e - 1]
        if v != 0:
            out[e - 1::e] += v * mu[1:D // e + 1]
    return out


def eratosthenes_transform(f: ArithmeticFunction, D: int,
                           tables: SieveTables) -> TruncatedDivisorSum:
    """Truncate ``f`` to its transform on 1..D.

    A closed-form transform rule is used when present and spot-checked
    against the Moebius convolution at 32 pseudo-random d.
    """
    D = int(D)
    if D < 1:
        raise InvalidArgumentError("D must be >= 1")
    if f.domain_limit is not None and D > f.domain_limit:
        raise InvalidArgumentError(
            f"D={D} exceeds the domain limit {f.domain_limit} of {f.name}")
    tables.check(D, "D")
    if f.transform_rule is None:
        return TruncatedDivisorSum(mobius_transform_values(f.values(D), tables), f.name)

    coeffs = f.transform(np.arange(1, D + 1))
    rng = np.random.default_rng(CROSS_CHECK_SEED)
    mu = tables.mu
    for d in rng.integers(1, D + 1, size=CROSS_CHECK_SAMPLES):
        d = int(d)
        direct = csum([int(mu[d // e]) * f(e) for e in tables.divisors(d)])
        if not close(coeffs[d - 1], direct):
            raise VerificationError(
                f"{f.name}: transform rule disagrees with f*mu at d={d}",
                case={"function": f.name, "d": d,
                      "rule": complex(coeffs[d - 1]), "convolution": direct})
    return TruncatedDivisorSum(coeffs, f.name)


def evaluate_truncated(tds: TruncatedDivisorSum, n: int) -> complex:
    """sum_{d | n, d <= D} f'(d) with correctly rounded summation."""
    n = int(n)
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    c = tds.coefficients
    return csum([c[d - 1] for d in divisors_upto(n, tds.truncation)])


def finite_ramanujan_coefficients(tds: TruncatedDivisorSum) -> RamanujanCoefficients:
    """fhat(q) = sum_{m <= D, q | m} f'(m)/m for q <= D, in O(D log D)."""
    D = tds.truncation
    m = np.arange(1, D + 1, dtype=float)
    w = np.empty(D, dtype=complex)
    w.real = tds.coefficients.real / m  # componentwise keeps f'(q)/q exact
    w.imag = tds.coefficients.imag / m
    hat = np.empty(D, dtype=complex)
    for q in range(1, D + 1):
        hat[q - 1] = w[q - 1::q].sum()
    return RamanujanCoefficients(hat)


def invert_coefficients(rc: RamanujanCoefficients,
                        tables: SieveTables | None = None) -> TruncatedDivisorSum:
    """Recover f'(d) = d * sum_{j <= Q/d} mu(j) fhat(dj)."""
    Q = rc.range
    if tables is None:
        tables = build_tables(max(Q, 1))
    tables.check(Q, "Q")
    mu = tables.mu
    hat = rc.coefficients
    out = np.empty(Q, dtype=complex)
    for d in range(1, Q + 1):
        out[d - 1] = d * (mu[1:Q // d + 1] * hat[d - 1::d]).sum()
    return TruncatedDivisorSum(out)


def reconstruct(rc: RamanujanCoefficients, n: int, tables: SieveTables) -> complex:
    """sum_{q <= Q} fhat(q) c_q(n)."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    c = ramanujan_sums(np.arange(1, rc.range + 1), n, tables)
    return csum(rc.coefficients * c)


def reconstruct_many(rc: RamanujanCoefficients, ns, tables: SieveTables,
                     chunk: int = 1 << 22) -> np.ndarray:
    """Vectorized ``reconstruct`` over many arguments (Ramanujan-matrix product)."""
    from .core_arith import ramanujan_matrix

    ns = np.asarray(ns, dtype=np.int64)
    Q = rc.range
    out = np.empty(ns.size, dtype=complex)
    step = max(1, chunk // max(Q, 1))
    for lo in range(0, ns.size, step):
        block = ns[lo:lo + step]
        out[lo:lo + step] = rc.coefficients @ ramanujan_matrix(Q, block, tables)
    return out


def zeta(x: float) -> float:
    """Riemann zeta for real x > 1."""
    if x <= 1:
        raise InvalidArgumentError("zeta(x) needs x > 1")
    return float(special.zeta(x))


def classical_coefficient_sigma(q: int, s: float) -> float:
    """Classical coefficient of sigma_{-s}: zeta(s+1) / q^(s+1)."""
    if s <= 0:
        raise InvalidArgumentError("s must be > 0; the classical series diverges")
    if q < 1:
        raise InvalidArgumentError("q must be >= 1")
    return zeta(s + 1) / q ** (s + 1)


# ---------------------------------------------------------------- catalog

def _trial_divisors(n: int) -> list[int]:
    return divisors_upto(n, n)


def _prime_power_base(n: int, tables: SieveTables) -> int:
    """p if n = p^k (k >= 1), else 0."""
    if n < 2:
        return 0
    p = int(tables.spf[n])
    while n % p == 0:
        n //= p
    return p if n == 1 else 0


def _one() -> ArithmeticFunction:
    return ArithmeticFunction(
        "one", lambda n: 1.0,
        transform_rule=lambda d: (d == 1).astype(float),
        tabulator=lambda M: np.ones(M))


def _mangoldt(tables: SieveTables) -> ArithmeticFunction:
    def ev(n):
        p = _prime_power_base(n, tables)
        return math.log(p) if p else 0.0

    def rule(d):
        return 0.0 - tables.mu[d] * np.log(d.astype(float))

    def tab(M):
        tables.check(M, "M")
        out = np.zeros(M)
        for p in tables.primes(M):
            lp = math.log(p)
            pk = int(p)
            while pk <= M:
                out[pk - 1] = lp
                pk *= int(p)
        return out

    return ArithmeticFunction("mangoldt", ev, rule, tables.limit, tab)


def _sigma(s: float) -> ArithmeticFunction:
    def ev(n):
        return math.fsum(d ** -s for d in _trial_divisors(n))

    def tab(M):
        out = np.zeros(M)
        for d in range(1, M + 1):
            out[d - 1::d] += d ** -s
        return out

    return ArithmeticFunction("sigma", ev, lambda d: d.astype(float) ** -s,
                              None, tab, {"s": s})


def _prime_product(tables: SieveTables, s: float, sign: int) -> ArithmeticFunction:
    name = "prod_minus" if sign < 0 else "prod_plus"

    def ev(n):
        out = 1.0
        for p, _ in tables.factorize(n):
            out *= 1 + sign * p ** -s
        return out

    def rule(d):
        m = tables.mu[d].astype(float)
        weight = m if sign < 0 else m * m
        return weight * d.astype(float) ** -s

    def tab(M):
        tables.check(M, "M")
        out = np.ones(M)
        for p in tables.primes(M):
            out[p - 1::p] *= 1 + sign * float(p) ** -s
        return out

    return ArithmeticFunction(name, ev, rule, tables.limit, tab, {"s": s})


CATALOG_NAMES = ("one", "mangoldt", "sigma", "prod_minus", "prod_plus", "block", "file")


def lookup(name: str, tables: SieveTables, **params) -> ArithmeticFunction:
    """Fetch a catalog function by name.

    ``sigma``/``prod_minus``/``prod_plus`` take ``s`` (default 1); ``block``
    takes ``c1``, ``c2``, ``H``; ``file`` takes ``path``.
    """
    if name == "one":
        return _one()
    if name == "mangoldt":
        return _mangoldt(tables)
    if name == "sigma":
        return _sigma(float(params.get("s", 1.0)))
    if name == "prod_minus":
        return _prime_product(tables, float(params.get("s", 1.0)), -1)
    if name == "prod_plus":
        return _prime_product(tables, float(params.get("s", 1.0)), +1)
    if name == "block":
        from .symmetry import BlockFunction

        return BlockFunction(complex(params.get("c1", 1)), complex(params.get("c2", -1)),
                             int(params.get("H", 10))).as_arithmetic_function()
    if name == "file":
        if "path" not in params:
            raise InvalidArgumentError("file functions need path=...")
        return load_custom(params["path"], tables)
    raise NotFoundError(f"unknown arithmetic function {name!r}")


def builtin_catalog(tables: SieveTables) -> list[ArithmeticFunction]:
    """Every catalog entry at default parameters (``file`` excluded)."""
    return [lookup(name, tables) for name in CATALOG_NAMES if name != "file"]


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    return complex(float(v))


def load_custom(path, tables: SieveTables) -> ArithmeticFunction:
    """Load a JSON function file.

    Either ``{"name": ..., "transform": [[re, im], ...]}`` giving f'(1..D), or
    ``{"name": ..., "values": [...]}`` giving f(1..N); the values form is
    transformed on load.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    name = str(doc.get("name", Path(path).stem))
    if "transform" in doc:
        tds = TruncatedDivisorSum([_as_complex(v) for v in doc["transform"]], name)
        D = tds.truncation
        padded = np.concatenate([[0j], tds.coefficients])

        def rule(d):
            return np.where(d <= D, padded[np.minimum(d, D)], 0)

        return ArithmeticFunction(name, tds, rule, None, tds.values,
                                  {"path": str(path)})
    if "values" in doc:
        vals = np.array([_as_complex(v) for v in doc["values"]], dtype=complex)
        if vals.size == 0:
            raise InvalidArgumentError(f"{path}: empty values list")
        transform = np.concatenate([[0j], mobius_transform_values(vals, tables)])
        return ArithmeticFunction(
            name, lambda n: vals[n - 1], lambda d: transform[d], vals.size,
            lambda M: vals[:M].copy(), {"path": str(path)})
    raise InvalidArgumentError(f"{path}: expected a 'transform' or 'values' key")
