"""The two-valued 2H-periodic block function f_H, the sgn autocorrelation
W_H and the symmetry integral

    J(N, H) = sum_{N < x <= 2N} | sum_{x-H <= n <= x+H} sgn(n - x) f(n) |^2,

used to show that the shift expansion of f_H is not in the first class.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .correlation import correlation_table, fmt
from .errors import InvalidArgumentError, DegenerateInputError
from .expansion import ArithmeticFunction, csum, tabulate

RESYNC_INTERVAL = 1 << 12


@dataclass(frozen=True)
class BlockFunction:
    """c1 on [1, H], c2 on (H, 2H], repeated with period 2H."""

    c1: complex
    c2: complex
    H: int

    def __post_init__(self):
        if self.H < 1:
            raise InvalidArgumentError("H must be >= 1")
        if self.c1 == self.c2:
            raise DegenerateInputError("c1 == c2 gives a constant function")

    def __call__(self, n: int) -> complex:
        return self.c1 if ((n - 1) // self.H) % 2 == 0 else self.c2

    def values(self, M: int) -> np.ndarray:
        block = (np.arange(M) // self.H) % 2
        return np.where(block == 0, self.c1, self.c2).astype(complex)

    @property
    def period(self) -> int:
        return 2 * self.H

    @property
    def mean_value(self) -> complex:
        return (self.c1 + self.c2) / 2

    def as_arithmetic_function(self) -> ArithmeticFunction:
        return ArithmeticFunction("block", self, tabulator=self.values,
                                  params={"c1": self.c1, "c2": self.c2, "H": self.H})


@dataclass(frozen=True, eq=False)
class SgnWeight:
    """W_H(h) for |h| <= 2H; ``values[h + 2H]`` holds W_H(h)."""

    H: int
    values: np.ndarray

    def __call__(self, h: int) -> int:
        if abs(h) > 2 * self.H:
            return 0
        return int(self.values[h + 2 * self.H])


def sgn_weight(H: int) -> SgnWeight:
    """W_H(h) = sum_{h2 - h1 = h, |h1|,|h2| <= H} sgn(h1) sgn(h2), in O(H).

    For 0 <= h <= 2H the same-sign pairs number 2 max(0, H - h) and the
    opposite-sign pairs are h1 in [max(-H, 1-h), min(-1, H-h)].
    """
    if H < 1:
        raise InvalidArgumentError("H must be >= 1")
    h = np.arange(0, 2 * H + 1)
    same = 2 * np.maximum(0, H - h)
    lo = np.maximum(-H, 1 - h)
    hi = np.minimum(-1, H - h)
    opposite = np.maximum(0, hi - lo + 1)
    half = same - opposite
    vals = np.concatenate([half[:0:-1], half]).astype(np.int64)
    vals.flags.writeable = False
    return SgnWeight(H, vals)


def _window_sums(v: np.ndarray, N: int, H: int) -> np.ndarray:
    """S(x) = sum_{k=1}^{H} (f(x+k) - f(x-k)) for N < x <= 2N.

    ``v[n-1]`` is f(n). Sliding update, re-synchronised against a direct
    window sum every RESYNC_INTERVAL steps.
    """
    exact = np.issubdtype(v.dtype, np.integer)
    out = np.empty(N, dtype=np.int64 if exact else complex)
    k = np.arange(1, H + 1)
    for start in range(0, N, RESYNC_INTERVAL):
        x0 = N + 1 + start
        m = min(RESYNC_INTERVAL, N - start)
        if exact:
            s0 = int(v[x0 + k - 1].sum() - v[x0 - k - 1].sum())
        else:
            s0 = csum(v[x0 + k - 1]) - csum(v[x0 - k - 1])
        xs = np.arange(x0, x0 + m - 1)
        # S(x+1) - S(x) = f(x+1+H) - f(x+1) - f(x) + f(x-H)
        delta = v[xs + H] - v[xs] - v[xs - 1] + v[xs - H - 1]
        block = np.empty(m, dtype=out.dtype)
        block[0] = s0
        block[1:] = s0 + np.cumsum(delta)
        out[start:start + m] = block
    return out


def symmetry_integral(f, N: int, H: int):
    """J(N, H); integer-valued input tables give an exact Python int."""
    if N < 1 or H < 1:
        raise InvalidArgumentError("need N >= 1 and H >= 1")
    if H > N:
        raise InvalidArgumentError("windows must stay inside [1, 2N+H]: need H <= N")
    if H > N / 10:
        warnings.warn(f"H={H} > N/10: outside the short-interval regime", stacklevel=2)
    v = f if isinstance(f, np.ndarray) else tabulate(f, 2 * N + H)
    if isinstance(f, np.ndarray) and v.size < 2 * N + H:
        raise InvalidArgumentError(f"need {2 * N + H} values, got {v.size}")
    if not np.issubdtype(v.dtype, np.integer) and np.all(v.imag == 0) \
            and np.all(v.real == np.round(v.real)) and np.max(np.abs(v.real)) < 2**40:
        v = v.real.astype(np.int64)
    S = _window_sums(v, N, H)
    if np.issubdtype(S.dtype, np.integer):
        return sum(int(s) * int(s) for s in S.tolist())
    return math.fsum((S.real**2 + S.imag**2).tolist())


def symmetry_integral_direct(f, N: int, H: int):
    """J by the defining double loop (test oracle)."""
    v = tabulate(f, 2 * N + H)
    total = []
    for x in range(N + 1, 2 * N + 1):
        s = csum([np.sign(n - x) * v[n - 1] for n in range(x - H, x + H + 1)])
        total.append(abs(s) ** 2)
    return math.fsum(total)


class SymmetryComparison(NamedTuple):
    value: complex
    direct_value: float
    gap: float


def symmetry_via_correlations(f, N: int, H: int) -> SymmetryComparison:
    """2 sum_{0 < h <= 2H} W_H(h) (C(2N, h) - C(N, h)) against J."""
    W = sgn_weight(H)
    hs = list(range(1, 2 * H + 1))
    c2 = correlation_table(f, f, 2 * N, hs).values
    c1 = correlation_table(f, f, N, hs).values
    w = np.array([W(h) for h in hs], dtype=float)
    value = 2 * csum(w * (c2 - c1))
    J = float(symmetry_integral(f, N, H))
    return SymmetryComparison(value, J, abs(value - J))


class IrregularityRow(NamedTuple):
    N: int
    H: int
    J: float
    J_over_NH2: float
    via_correlations: float
    gap: float


def default_H_rule(N: int) -> int:
    return max(1, math.isqrt(N) // 2)


def irregularity_experiment(c1: complex = 1, c2: complex = -1,
                            N_grid: Sequence[int] = (10**3, 10**4, 10**5),
                            H_rule: Callable[[int], int] = default_H_rule,
                            correlations: bool = True) -> list[IrregularityRow]:
    """J/(N H^2) for f_H across an N grid with H = H_rule(N) <= sqrt(N)."""
    rows = []
    for N in N_grid:
        H = int(H_rule(N))
        if H * H > N:
            raise InvalidArgumentError(f"H_rule gave H={H} > sqrt(N) at N={N}")
        fH = BlockFunction(complex(c1), complex(c2), H)
        if correlations:
            cmp = symmetry_via_correlations(fH, N, H)
            J, via, gap = cmp.direct_value, cmp.value.real, cmp.gap
        else:
            J = float(symmetry_integral(fH, N, H))
            via, gap = float("nan"), float("nan")
        rows.append(IrregularityRow(N, H, J, J / (N * H * H), via, gap))
    return rows


IRREGULARITY_HEADER = "N,H,J,J_over_NH2,via_correlations,gap"


def irregularity_csv(rows: Sequence[IrregularityRow]) -> str:
    buf = io.StringIO()
    buf.write(IRREGULARITY_HEADER + "\n")
    for r in rows:
        buf.write(f"{r.N},{r.H},{fmt(r.J)},{fmt(r.J_over_NH2)},"
                  f"{fmt(r.via_correlations)},{fmt(r.gap)}\n")
    return buf.getvalue()
