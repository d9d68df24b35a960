"""
Correlations of sieve functions
===============================

"""

# sigma(n)/n truncated at D = N^0.3: correlation minus singular sum times N
import math
from ramexp import (build_tables, correlate_direct, eratosthenes_transform,
                    finite_ramanujan_coefficients, lookup, singular_sum_coefficient_form)
t = build_tables(10**5)
sig = lookup("sigma", t, s=1)
for N in (10**3, 10**4, 10**5):
    D = math.floor(N ** 0.3)
    f = eratosthenes_transform(sig, D, t)
    fc = finite_ramanujan_coefficients(f)
    worst = max(abs(correlate_direct(f, f, N, h) - N * singular_sum_coefficient_form(fc, fc, h, t).value)
                for h in range(21))
    print(f"N={N:>6d} D={D:2d}  max_h |C - S N| = {worst:9.4f}   / (D log N) = {worst / (D * math.log(N)):.4f}")

# the same correlation through the coefficients and exact periodic inner sums
from ramexp.sieve import SieveFunction, fre_correlation_formula
g = SieveFunction(eratosthenes_transform(sig, 12, t))
r = fre_correlation_formula(g, g, 5000, 2, t)
print("formula:", r.value.real, " direct:", r.direct.real, " level sum:", round(r.level_sum, 3))

# sifting out small primes: G-sifted functions keep only coefficients at large-prime indices
from ramexp.sieve import make_gsifted, coprime_correlation
import numpy as np
h = make_gsifted(lambda d: np.ones(d.size), 60, 5, t)
print("support:", h.support())
print(coprime_correlation(h, h, 10**4, 3, 7, t))
