"""
Symmetry of a block function in short intervals
===============================================

"""

# f_H is c1 on [1, H], c2 on (H, 2H], repeated
from ramexp.symmetry import BlockFunction, sgn_weight, irregularity_experiment, irregularity_csv
f = BlockFunction(1, -1, 4)
print([f(n) for n in range(1, 17)])

# the sgn window autocorrelation is even and sums to zero
W = sgn_weight(4)
print({h: W(h) for h in range(-8, 9)})

# J / (N H^2) with H = isqrt(N) // 2 stays near 4/3 as N grows
rows = irregularity_experiment(1, -1, (10**3, 10**4, 10**5))
print(irregularity_csv(rows))
