"""Exact integer arithmetic: Moebius, Euler phi, smallest prime factors and
Ramanujan sums.

Tables are numpy arrays indexed directly by ``n`` (slot 0 is padding), so
``tables.mu[6] == 1`` and ``tables.mu[1:7]`` is the familiar list.

Ramanujan sums are integers and are computed two ways:

* divisor-sum form   c_q(n) = sum_{d | (q, n)} d * mu(q / d)
* Hoelder's form     c_q(n) = phi(q) mu(q/g) / phi(q/g),  g = (n, q)

The divisor-sum form is the reference scalar route; Hoelder's form is the
cross-check and also backs the vectorized kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError

DEFAULT_LIMIT = 10**7
# rough peak bytes per table entry while sieving (mu, phi, spf, scratch)
_BYTES_PER_ENTRY = 40
MEMORY_BUDGET_BYTES = 4 * 2**30


@dataclass(frozen=True, eq=False)
class SieveTables:
    limit: int
    mu: np.ndarray
    phi: np.ndarray
    smallest_prime_factor: np.ndarray

    @property
    def spf(self) -> np.ndarray:
        return self.smallest_prime_factor

    def check(self, n: int, what: str = "n") -> None:
        if not 1 <= n <= self.limit:
            raise InvalidArgumentError(
                f"{what}={n} outside table range [1, {self.limit}]")

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else min(upto, self.limit)
        idx = np.arange(2, upto + 1)
        return idx[self.spf[2:upto + 1] == idx]

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of ``n`` as ``[(p, k), ...]`` ascending."""
        self.check(n)
        out = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        return out

    def divisors(self, n: int) -> list[int]:
        """All divisors of ``n`` in ascending order."""
        divs = [1]
        for p, k in self.factorize(n):
            divs = [d * p**j for d in divs for j in range(k + 1)]
        return sorted(divs)


def build_tables(limit: int) -> SieveTables:
    """Sieve mu, phi and smallest prime factors for 1 <= n <= limit."""
    limit = int(limit)
    if limit < 1:
        raise InvalidArgumentError("limit must be >= 1")
    if limit * _BYTES_PER_ENTRY > MEMORY_BUDGET_BYTES:
        raise ResourceLimitError(
            f"tables up to {limit} exceed the memory budget of "
            f"{MEMORY_BUDGET_BYTES} bytes")

    spf = np.zeros(limit + 1, dtype=np.int64)
    root = math.isqrt(limit)
    small = []
    for p in range(2, root + 1):
        if spf[p] == 0:
            small.append(p)
            seg = spf[p * p::p]
            seg[seg == 0] = p
    idx = np.arange(limit + 1, dtype=np.int64)
    unset = spf == 0
    spf[unset] = idx[unset]
    spf[0] = 0

    mu = np.ones(limit + 1, dtype=np.int8)
    phi = idx.copy()
    # after removing all primes <= sqrt(limit), at most one prime is left
    cofactor = idx.copy()
    for p in small:
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
        phi[p::p] -= phi[p::p] // p
        pk = p
        while pk <= limit:
            cofactor[pk::pk] //= p
            pk *= p
    big = cofactor > 1
    mu[big] *= -1
    phi[big] = phi[big] // cofactor[big] * (cofactor[big] - 1)
    mu[0] = 0
    phi[0] = 0

    for arr in (mu, phi, spf):
        arr.flags.writeable = False
    return SieveTables(limit, mu, phi, spf)


@lru_cache(maxsize=4)
def shared_tables(limit: int) -> SieveTables:
    """Process-wide cached tables; safe to share since they are read-only."""
    return build_tables(limit)


def ramanujan_sum(q: int, n: int, tables: SieveTables) -> int:
    """c_q(n) by the divisor-sum form; ``n`` may be any integer."""
    q = int(q)
    if q < 1:
        raise InvalidArgumentError("q must be >= 1")
    tables.check(q, "q")
    g = math.gcd(q, int(n) % q)
    mu = tables.mu
    return sum(d * int(mu[q // d]) for d in tables.divisors(g))


def ramanujan_sum_holder(q: int, n: int, tables: SieveTables) -> int:
    """c_q(n) by Hoelder's identity."""
    q = int(q)
    if q < 1:
        raise InvalidArgumentError("q must be >= 1")
    tables.check(q, "q")
    m = q // math.gcd(q, int(n) % q)
    return int(tables.mu[m]) * (int(tables.phi[q]) // int(tables.phi[m]))


def ramanujan_sums(qs, n: int, tables: SieveTables) -> np.ndarray:
    """Vectorized c_q(n) over an array of moduli (Hoelder's form, exact int64)."""
    qs = np.asarray(qs, dtype=np.int64)
    if qs.size and (qs.min() < 1 or qs.max() > tables.limit):
        raise InvalidArgumentError("moduli outside table range")
    g = np.gcd(qs, _mod_array(n, qs))
    m = qs // g
    return tables.mu[m].astype(np.int64) * (tables.phi[qs] // tables.phi[m])


def _mod_array(n: int, qs: np.ndarray) -> np.ndarray:
    n = int(n)
    if -(2**62) < n < 2**62:
        return np.mod(np.int64(n), qs)
    return np.array([n % int(q) for q in qs], dtype=np.int64)


def ramanujan_period(q: int, tables: SieveTables) -> np.ndarray:
    """The period (c_q(0), c_q(1), ..., c_q(q-1)) as int64."""
    tables.check(q, "q")
    g = np.gcd(np.arange(q, dtype=np.int64), np.int64(q))
    m = q // g
    return tables.mu[m].astype(np.int64) * (tables.phi[q] // tables.phi[m])


def ramanujan_row(q: int, ns, tables: SieveTables) -> np.ndarray:
    """c_q(n) for every n in ``ns`` (any integers)."""
    ns = np.asarray(ns, dtype=np.int64)
    return ramanujan_period(q, tables)[np.mod(ns, q)]


def ramanujan_matrix(qmax: int, ns, tables: SieveTables) -> np.ndarray:
    """Matrix M[q-1, j] = c_q(ns[j]) for 1 <= q <= qmax."""
    tables.check(qmax, "qmax")
    ns = np.asarray(ns, dtype=np.int64)
    qs = np.arange(1, qmax + 1, dtype=np.int64)[:, None]
    g = np.gcd(qs, np.mod(ns[None, :], qs))
    m = qs // g
    return tables.mu[m].astype(np.int64) * (tables.phi[qs] // tables.phi[m])


def primorial(G: int, tables: SieveTables) -> int:
    """P(G), the product of all primes p <= G, as a Python int."""
    G = int(G)
    if G < 1:
        raise InvalidArgumentError("G must be >= 1")
    tables.check(G, "G")
    return math.prod(int(p) for p in tables.primes(G))


def divisor_count(n: int, tables: SieveTables) -> int:
    """d(n), the number of divisors of n."""
    return math.prod(k + 1 for _, k in tables.factorize(int(n)))


def euler_phi(n: int, tables: SieveTables) -> int:
    tables.check(n)
    return int(tables.phi[n])


def moebius(n: int, tables: SieveTables) -> int:
    tables.check(n)
    return int(tables.mu[n])


def is_coprime_to_primorial(q: int, G: int, tables: SieveTables) -> bool:
    """True when every prime factor of ``q`` exceeds ``G``."""
    return q == 1 or int(tables.spf[q]) > G
