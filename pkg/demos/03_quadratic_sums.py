"""
Unbiasedness as a quadratic exponential sum
===========================================

Cross-basis overlaps of the constructed families factor into quadratic
exponential sums S(u, v, w) whose modulus is known exactly: |S|^2 = w.
This gives an independent, number-theoretic route to the same 1/d law.
"""

import itertools

from mubkit import check_factoring, gauss_sum, mub_gauss_params

# A single sum: w terms of unit modulus, yet the total always lands on
# the circle of radius sqrt(w) when (u, v, w) is admissible.
params = mub_gauss_params(a=0, b=1, alpha=0, beta=0, d=5)
s = gauss_sum(params)
print(f"params: u={params.u}, v={params.v}, w={params.w}")
print(f"S = {s:.6f},  |S|^2 = {abs(s) ** 2:.12f}")

# The identity holds for every admissible cross-basis pair.  Worst case
# over all of d = 7:
worst = max(
    abs(abs(gauss_sum(mub_gauss_params(a, b, alpha, beta, 7))) ** 2 - 7)
    for a, b in itertools.permutations(range(7), 2)
    for alpha in range(7)
    for beta in range(7)
)
print(f"\nd = 7, all {7 * 6 * 49} cross-basis sums: worst | |S|^2 - 7 | = {worst:.2e}")

# check_factoring recomputes one overlap both ways: the double sum over
# matrix entries and the squared modulus of the single quadratic sum.
gap = check_factoring(a=2, b=0, alpha=1, beta=2, d=11)
print(f"factoring gap at d = 11: {gap:.2e}")

# Inadmissible parameters are refused, not silently summed: u and w
# must be coprime, u*w nonzero, and u*w + v even.
try:
    mub_gauss_params(a=1, b=1, alpha=0, beta=0, d=5)
except ValueError as exc:
    print(f"\nrejected: {exc}")
