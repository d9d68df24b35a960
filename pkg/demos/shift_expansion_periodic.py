"""
Expanding a correlation in its shift
====================================

"""

# f(n) = 1 + [2 | n]: correlations alternate 10, 8, 10, 8 at N = 4
from ramexp import (TruncatedDivisorSum, build_tables, finite_ramanujan_coefficients,
                    reconstruct_correlation)
from ramexp.shift_expansion import ShiftCorrelation, carmichael_limit, shift_expansion
t = build_tables(4096)
f = TruncatedDivisorSum([1, 1])
C = ShiftCorrelation(f, f, 4)
print("C(4, h):", [C(h).real for h in range(6)])

# two routes to the coefficients: averaging over shifts, or the closed formula
gc = finite_ramanujan_coefficients(f)
se = shift_expansion(f, gc, 4, t)
print("explicit:", se.coefficients.real)
print("Carmichael:", [carmichael_limit(C, ell, t, period=2)[0].real for ell in (1, 2)])
print("rebuilt:", [reconstruct_correlation(se, h, t).real for h in range(6)])

# a smoother example: sigma(n)/n truncated at 100, with fitted decay of the coefficients
from ramexp import eratosthenes_transform, lookup
from ramexp.shift_expansion import first_class_constant
sig = eratosthenes_transform(lookup("sigma", t, s=1), 100, t)
for N in (10**3, 10**4):
    se = shift_expansion(sig, finite_ramanujan_coefficients(sig), N, t)
    print(f"N={N}: delta fit {se.decay_exponent_fit:.3f}, max |C^| l^2 / N = {first_class_constant(se):.4f}")
