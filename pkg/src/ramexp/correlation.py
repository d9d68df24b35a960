"""Shifted convolution sums C_{f,g}(N, h) = sum_{n <= N} f(n) g(n + h) and
singular sums S_{f,g}(h) = sum_q fhat(q) ghat(q) c_q(h).
"""
from __future__ import annotations

import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core_arith import SieveTables, ramanujan_sums
from .errors import InvalidArgumentError
from .expansion import (
    ArithmeticFunction,
    RamanujanCoefficients,
    TruncatedDivisorSum,
    csum,
    eratosthenes_transform,
    finite_ramanujan_coefficients,
    lookup,
    tabulate,
)

CSV_HEADER = "h,value_re,value_im,singular_re,singular_im,residual_re,residual_im"


class OddShiftWarning(UserWarning):
    """Odd shifts make the twin-prime singular series vanish."""


def fmt(x: float) -> str:
    """Shortest round-trip decimal for a float."""
    return repr(float(x))


@dataclass(frozen=True, eq=False)
class SingularSum:
    value: complex
    h: int
    range: int


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    N: int
    shifts: tuple
    values: np.ndarray
    method: str = "direct"
    singular: np.ndarray | None = None

    @property
    def residuals(self) -> np.ndarray | None:
        if self.singular is None:
            return None
        return self.values - self.singular * self.N

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        nan = complex(float("nan"), float("nan"))
        res = self.residuals
        for i, h in enumerate(self.shifts):
            v = self.values[i]
            s = self.singular[i] if self.singular is not None else nan
            r = res[i] if res is not None else nan
            buf.write(",".join([str(h), fmt(v.real), fmt(v.imag), fmt(s.real),
                                fmt(s.imag), fmt(r.real), fmt(r.imag)]) + "\n")
        return buf.getvalue()


def _check_Nh(N: int, h: int) -> None:
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if h < 0:
        raise InvalidArgumentError("shift h must be >= 0")


def correlate_direct(f, g, N: int, h: int) -> complex:
    """C_{f,g}(N,h) by the defining loop, correctly rounded."""
    _check_Nh(N, h)
    fv = tabulate(f, N)
    gv = tabulate(g, N + h)[h:]
    return csum(fv * gv)


def correlation_table(f, g, N: int, shifts: Sequence[int], *,
                      singular: Sequence[complex] | None = None,
                      threads: int = 1) -> CorrelationTable:
    """C_{f,g}(N,h) for every h in ``shifts``; rows stay in shift order."""
    shifts = tuple(int(h) for h in shifts)
    if not shifts:
        raise InvalidArgumentError("no shifts given")
    for h in shifts:
        _check_Nh(N, h)
    fv = tabulate(f, N)
    gv = tabulate(g, N + max(shifts))

    def one(h):
        return csum(fv * gv[h:h + N])

    if threads == 1:
        vals = [one(h) for h in shifts]
    else:
        with ThreadPoolExecutor(max_workers=threads or None) as pool:
            vals = list(pool.map(one, shifts))
    sing = None if singular is None else np.asarray(singular, dtype=complex)
    return CorrelationTable(N, shifts, np.array(vals, dtype=complex), "direct", sing)


def crt_count(d: int, q: int, N: int, h: int) -> int:
    """#{1 <= n <= N : d | n, n = -h (mod q)}, exactly."""
    g = math.gcd(d, q)
    if h % g:
        return 0
    L = d // g * q
    qq = q // g
    k0 = ((-h // g) * pow(d // g, -1, qq)) % qq if qq > 1 else 0
    n0 = d * k0 or L
    return (N - n0) // L + 1 if n0 <= N else 0


def correlate_via_divisors(f: TruncatedDivisorSum, g: TruncatedDivisorSum,
                           N: int, h: int) -> complex:
    """C_{f,g}(N,h) = sum_d f'(d) sum_q g'(q) #{n <= N: d | n, q | n + h}."""
    _check_Nh(N, h)
    fs = [int(d) for d in f.support() if d <= N]
    gs = [int(q) for q in g.support() if q <= N + h]
    terms = []
    for d in fs:
        fd = f.coefficients[d - 1]
        for q in gs:
            cnt = crt_count(d, q, N, h)
            if cnt:
                terms.append(fd * g.coefficients[q - 1] * cnt)
    return csum(terms) if terms else 0j


def singular_sum_coefficient_form(fc: RamanujanCoefficients, gc: RamanujanCoefficients,
                                  h: int, tables: SieveTables) -> SingularSum:
    """sum_q fhat(q) ghat(q) c_q(h) over the common support."""
    if h < 0:
        raise InvalidArgumentError("shift h must be >= 0")
    R = min(fc.range, gc.range)
    c = ramanujan_sums(np.arange(1, R + 1), h, tables)
    return SingularSum(csum(fc.coefficients[:R] * gc.coefficients[:R] * c), h, R)


def singular_sum_eratosthenes_form(f: TruncatedDivisorSum, g: TruncatedDivisorSum,
                                   h: int) -> SingularSum:
    """sum_{l | h} l sum_d f'(d)/d sum_{(q, d) = l} g'(q)/q.

    For h = 0 every l counts; l beyond min(D_f, D_g) contributes nothing.
    """
    if h < 0:
        raise InvalidArgumentError("shift h must be >= 0")
    R = min(f.truncation, g.truncation)
    if h == 0:
        ls = range(1, R + 1)
    else:
        ls = [l for l in range(1, min(h, R) + 1) if h % l == 0]
    parts = []
    for l in ls:
        a = f.coefficients[l - 1::l]
        b = g.coefficients[l - 1::l]
        ia, ib = np.flatnonzero(a), np.flatnonzero(b)
        if ia.size == 0 or ib.size == 0:
            continue
        t, r = ia + 1, ib + 1
        wa = a[ia] / (l * t)
        wb = b[ib] / (l * r)
        coprime = np.gcd.outer(t, r) == 1
        parts.append(l * (np.outer(wa, wb) * coprime).sum())
    return SingularSum(csum(parts) if parts else 0j, h, R)


class Heuristic(NamedTuple):
    correlation: complex
    singular: complex
    residual: complex


def truncate_pair(f, g, N: int, h: int, tables: SieveTables,
                  convention: str = "common"):
    """Truncated divisor sums for a correlation of length N at shift h.

    ``common`` truncates both at N; ``shifted`` truncates g at N + h, which
    keeps g exact on 1..N+h.
    """
    if convention not in ("common", "shifted"):
        raise InvalidArgumentError(f"unknown truncation convention {convention!r}")
    Dg = N if convention == "common" else N + h

    def trunc(x, D):
        if isinstance(x, TruncatedDivisorSum):
            return x
        return eratosthenes_transform(x, D, tables)

    return trunc(f, N), trunc(g, Dg)


def heuristic_residual(f, g, N: int, h: int, tables: SieveTables,
                       convention: str = "common") -> Heuristic:
    """(C, S, C - S N): the correlation of the functions as given against the
    singular sum of their truncated expansions."""
    ft, gt = truncate_pair(f, g, N, h, tables, convention)
    C = correlate_direct(f, g, N, h)
    S = singular_sum_coefficient_form(finite_ramanujan_coefficients(ft),
                                      finite_ramanujan_coefficients(gt), h, tables).value
    return Heuristic(C, S, C - S * N)


def twin_singular_series_partial(h: int, Q: int, tables: SieveTables) -> float:
    """sum_{q <= Q} mu^2(q)/phi^2(q) c_q(h)."""
    if h < 1:
        raise InvalidArgumentError("h must be a positive integer")
    if h % 2:
        warnings.warn(f"h={h} is odd: the twin singular series vanishes",
                      OddShiftWarning, stacklevel=2)
    tables.check(Q, "Q")
    qs = np.arange(1, Q + 1)
    mu2 = tables.mu[qs].astype(float) ** 2
    phi = tables.phi[qs].astype(float)
    c = ramanujan_sums(qs, h, tables).astype(float)
    return math.fsum(mu2 * c / (phi * phi))


def mangoldt_coefficients(N: int, tables: SieveTables) -> RamanujanCoefficients:
    """Finite Ramanujan coefficients of Lambda_N(n) = sum_{d|n, d<=N} -mu(d) log d."""
    return finite_ramanujan_coefficients(
        eratosthenes_transform(lookup("mangoldt", tables), N, tables))


class SingularComparison(NamedTuple):
    truncated: float
    ideal_partial: float
    difference: float


def truncated_vs_ideal_singular(N: int, h: int, tables: SieveTables,
                                Q_ideal: int = 10**5) -> SingularComparison:
    """S_{Lambda_N, Lambda_N}(h) against the partial twin series up to Q_ideal."""
    rc = mangoldt_coefficients(N, tables)
    S_N = singular_sum_coefficient_form(rc, rc, h, tables).value.real
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OddShiftWarning)
        S_ideal = twin_singular_series_partial(h, Q_ideal, tables)
    return SingularComparison(S_N, S_ideal, S_N - S_ideal)


def as_tds(x, D: int, tables: SieveTables) -> TruncatedDivisorSum:
    """Pass a TruncatedDivisorSum through; truncate an ArithmeticFunction at D."""
    if isinstance(x, TruncatedDivisorSum):
        return x
    if isinstance(x, ArithmeticFunction):
        return eratosthenes_transform(x, D, tables)
    return TruncatedDivisorSum(x)
