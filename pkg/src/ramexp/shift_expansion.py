"""Ramanujan expansions of a correlation with respect to its shift,

    C_{f,g}(N, h) = sum_l Chat(N, l) c_l(h),

with coefficients from Carmichael's mean value or from the explicit formula
Chat(N, l) = ghat(l)/phi(l) * sum_{n <= N} f(n) c_l(n).
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core_arith import SieveTables, ramanujan_period, ramanujan_row, ramanujan_sums
from .correlation import fmt
from .errors import InsufficientDataError, InvalidArgumentError
from .expansion import RamanujanCoefficients, csum, tabulate

MIN_FIT_POINTS = 8
FIT_FLOOR = 1e-12


class ShiftCorrelation:
    """h -> C_{f,g}(N, h) with the tabulated g extended on demand."""

    def __init__(self, f, g, N: int):
        if N < 1:
            raise InvalidArgumentError("N must be >= 1")
        self.f, self.g, self.N = f, g, N
        self._fv = tabulate(f, N)
        self._gv = tabulate(g, N)

    def _extend(self, hmax: int) -> None:
        need = self.N + hmax
        if self._gv.size < need:
            self._gv = tabulate(self.g, max(need, 2 * self._gv.size))

    def __call__(self, h: int) -> complex:
        if h < 0:
            raise InvalidArgumentError("shift h must be >= 0")
        self._extend(h)
        return csum(self._fv * self._gv[h:h + self.N])

    def values(self, hs) -> np.ndarray:
        hs = [int(h) for h in hs]
        if hs:
            self._extend(max(hs))
        return np.array([self(h) for h in hs], dtype=complex)


@dataclass(frozen=True, eq=False)
class ShiftExpansion:
    N: int
    coefficients: np.ndarray
    method: str
    decay_exponent_fit: float | None = None

    @property
    def support(self) -> int:
        return self.coefficients.size

    def __getitem__(self, ell: int) -> complex:
        return complex(self.coefficients[ell - 1]) if 1 <= ell <= self.support else 0j

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("ell,coeff_re,coeff_im,method\n")
        for ell, c in enumerate(self.coefficients, start=1):
            buf.write(f"{ell},{fmt(c.real)},{fmt(c.imag)},{self.method}\n")
        return buf.getvalue()

    def diagnostics_json(self, max_residual: float) -> str:
        delta = self.decay_exponent_fit
        return json.dumps({"delta_fit": None if delta is None else float(delta),
                           "max_residual": float(max_residual),
                           "support": int(self.support)}, sort_keys=True)


@dataclass(frozen=True)
class OrthogonalityReport:
    q: int
    ell: int
    x: int
    n: int
    value: float
    expected: int
    total: int = 0

    @property
    def full_period(self) -> bool:
        return self.x % math.lcm(self.q, self.ell) == 0


def _shift_values(C, x: int) -> np.ndarray:
    """C(1..x) from a callable, ShiftCorrelation, or an array holding C(1..)."""
    if isinstance(C, ShiftCorrelation):
        return C.values(range(1, x + 1))
    if callable(C):
        return np.array([C(h) for h in range(1, x + 1)], dtype=complex)
    arr = np.asarray(C, dtype=complex)
    if arr.size < x:
        raise InvalidArgumentError(f"{arr.size} shift values given, {x} needed")
    return arr[:x]


def carmichael_coefficient(C, ell: int, x: int, tables: SieveTables) -> complex:
    """(1/(phi(l) x)) sum_{h <= x} C(h) c_l(h) at a finite averaging length."""
    if x < 1 or ell < 1:
        raise InvalidArgumentError("need x >= 1 and l >= 1")
    tables.check(ell, "l")
    vals = _shift_values(C, x)
    c = ramanujan_row(ell, np.arange(1, x + 1), tables)
    return csum(vals * c) / (int(tables.phi[ell]) * x)


def carmichael_limit(C, ell: int, tables: SieveTables, *, period: int | None = None,
                     x0: int = 64, rtol: float = 1e-6, max_doublings: int = 14):
    """Probe the Carmichael limit; returns ``(value, x)``.

    With a known shift period the exact full-period average is used.
    Otherwise x runs over x0 * 2^k until successive values agree to rtol.
    """
    if period is not None:
        x = math.lcm(int(period), int(ell))
        return carmichael_coefficient(C, ell, x, tables), x
    x = x0
    prev = carmichael_coefficient(C, ell, x, tables)
    for _ in range(max_doublings):
        x *= 2
        cur = carmichael_coefficient(C, ell, x, tables)
        if abs(cur - prev) <= rtol * max(abs(cur), abs(prev), 1e-300):
            return cur, x
        prev = cur
    return prev, x


def twisted_mean(f, N: int, ell: int, tables: SieveTables) -> complex:
    """sum_{n <= N} f(n) c_l(n)."""
    fv = tabulate(f, N)
    return csum(fv * ramanujan_row(ell, np.arange(1, N + 1), tables))


def explicit_coefficient(f, gc: RamanujanCoefficients, N: int, ell: int,
                         tables: SieveTables) -> complex:
    """ghat(l)/phi(l) * sum_{n <= N} f(n) c_l(n); zero beyond the ghat range."""
    if ell < 1:
        raise InvalidArgumentError("l must be >= 1")
    if ell > gc.range or gc[ell] == 0:
        return 0j
    return gc[ell] / int(tables.phi[ell]) * twisted_mean(f, N, ell, tables)


def shift_expansion(f, gc: RamanujanCoefficients, N: int, tables: SieveTables, *,
                    method: str = "explicit", g=None, period: int | None = None,
                    fit: bool = True) -> ShiftExpansion:
    """Coefficients Chat(N, l) for l up to the ghat range.

    ``method="carmichael"`` needs the function ``g`` itself; pass ``period``
    when the correlation is periodic in h to get exact full-period averages.
    """
    L = gc.range
    if method == "explicit":
        fv = tabulate(f, N)
        ns = np.arange(1, N + 1)
        coeffs = np.zeros(L, dtype=complex)
        for ell in range(1, L + 1):
            if gc.coefficients[ell - 1] != 0:
                s = csum(fv * ramanujan_row(ell, ns, tables))
                coeffs[ell - 1] = gc.coefficients[ell - 1] / int(tables.phi[ell]) * s
    elif method == "carmichael":
        if g is None:
            raise InvalidArgumentError("the Carmichael method needs g")
        C = ShiftCorrelation(f, g, N)
        coeffs = np.array([carmichael_limit(C, ell, tables, period=period)[0]
                           for ell in range(1, L + 1)], dtype=complex)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    delta = None
    if fit:
        try:
            delta = decay_class_fit(coeffs, N)
        except InsufficientDataError:
            pass
    return ShiftExpansion(N, coeffs, method, delta)


def reconstruct_correlation(se: ShiftExpansion, h: int, tables: SieveTables) -> complex:
    """sum_l Chat(N, l) c_l(h) over the finite support."""
    if h < 0:
        raise InvalidArgumentError("shift h must be >= 0")
    if se.support == 0:
        return 0j
    c = ramanujan_sums(np.arange(1, se.support + 1), h, tables)
    return csum(se.coefficients * c)


def reconstruction_residuals(se: ShiftExpansion, f, g, hs: Sequence[int],
                             tables: SieveTables) -> np.ndarray:
    """Reconstructed minus directly computed C(N, h) for each h."""
    C = ShiftCorrelation(f, g, se.N)
    direct = C.values(hs)
    rec = np.array([reconstruct_correlation(se, h, tables) for h in hs])
    return rec - direct


def decay_class_fit(se, N: int | None = None) -> float:
    """Least-squares slope of log|Chat| against log l; returns -slope - 1.

    Only l with |Chat(N, l)| > 1e-12 N enter the fit.
    """
    if isinstance(se, ShiftExpansion):
        coeffs, N = se.coefficients, se.N
    else:
        coeffs = np.asarray(se, dtype=complex)
        if N is None:
            raise InvalidArgumentError("N is required with a bare coefficient array")
    mags = np.abs(coeffs)
    ells = np.flatnonzero(mags > FIT_FLOOR * N) + 1
    if ells.size < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"{ells.size} usable coefficients, at least {MIN_FIT_POINTS} needed")
    slope, _ = np.polyfit(np.log(ells), np.log(mags[ells - 1]), 1)
    return float(-slope - 1)


def first_class_constant(se: ShiftExpansion) -> float:
    """max_l |Chat(N, l)| l^2 / N."""
    ells = np.arange(1, se.support + 1)
    return float(np.max(np.abs(se.coefficients) * ells**2) / se.N)


def orthogonality_check(q: int, ell: int, x: int, tables: SieveTables,
                        n: int = 0) -> OrthogonalityReport:
    """(1/x) sum_{h <= x} c_q(n + h) c_l(h) against 1_{q=l} c_l(n)."""
    if x < 1:
        raise InvalidArgumentError("x must be >= 1")
    hs = np.arange(1, x + 1)
    a = ramanujan_row(q, hs + n, tables)
    b = ramanujan_row(ell, hs, tables)
    total = int(np.dot(a, b))
    expected = int(ramanujan_period(ell, tables)[n % ell]) if q == ell else 0
    return OrthogonalityReport(q, ell, x, n, total / x, expected, total)

