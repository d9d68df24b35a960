"""
The twin-prime singular series
==============================

"""

# partial sums over q <= Q next to the Euler product
import math
import numpy as np
from ramexp import build_tables, twin_singular_series_partial, truncated_vs_ideal_singular
t = build_tables(10**6)

def euler_product(pmax):
    sieve = np.ones(pmax + 1, bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(pmax) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    p = np.flatnonzero(sieve)[1:].astype(float)
    return 2 * np.prod(1 - 1 / (p - 1) ** 2)

target = euler_product(10**6)
for Q in (10, 100, 10**3, 10**4, 10**5):
    s = twin_singular_series_partial(2, Q, t)
    print(f"Q={Q:>6d}  partial={s:.10f}  gap={s - target:+.2e}")

# odd shifts: the series vanishes
import warnings
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    print("h=3, Q=1e4:", twin_singular_series_partial(3, 10**4, t))

# the singular sum of the truncated Lambda_N against the partial series
for N in (10**3, 10**4, 10**5):
    r = truncated_vs_ideal_singular(N, 2, t)
    print(f"N={N:>7d}  S_N={r.truncated:.6f}  difference={r.difference:+.6f}")
