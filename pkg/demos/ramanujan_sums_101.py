"""
Ramanujan sums and finite expansions
====================================

"""

# sieve tables: Moebius, totient and smallest prime factor up to a limit
import numpy as np
from ramexp import build_tables, ramanujan_sum
from ramexp.core_arith import ramanujan_matrix
t = build_tables(10**4)

# c_q(n) for small q and n; every entry is an integer
M = ramanujan_matrix(8, np.arange(0, 13), t)
print("   n:", " ".join(f"{n:3d}" for n in range(13)))
for q, row in enumerate(M, start=1):
    print(f"q={q:2d}:", " ".join(f"{v:3d}" for v in row))

# the gcd/phi closed form gives the same numbers
from ramexp import ramanujan_sum_holder
assert all(ramanujan_sum(q, n, t) == ramanujan_sum_holder(q, n, t)
           for q in range(1, 200) for n in range(200))

# von Mangoldt truncated at D: transform, coefficients, then back again
from ramexp import (eratosthenes_transform, finite_ramanujan_coefficients,
                    invert_coefficients, lookup, reconstruct)
lam = eratosthenes_transform(lookup("mangoldt", t), 1000, t)
hat = finite_ramanujan_coefficients(lam)
back = invert_coefficients(hat, t)
print("round trip error:", np.max(np.abs(back.coefficients - lam.coefficients)))

# reconstruct Lambda(n) from the coefficients at a few n
for n in (7, 8, 12, 997):
    print(n, reconstruct(hat, n, t).real, lam(n).real)

# the top half of the coefficients is just f'(q)/q
D = lam.D
q = np.arange(D // 2 + 1, D + 1)
print("high-index law holds:", np.array_equal(hat.coefficients[q - 1].real, lam.coefficients[q - 1].real / q))
