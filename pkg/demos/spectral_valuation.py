"""The functional calculus and the spectral valuation on a small operator,
checked against floating-point eigendecomposition.

Run with ``python3 demos/spectral_valuation.py``.
"""
from fractions import Fraction

import numpy as np

from qlattice import BoundedOperator, PLFunction, Vector, integral, parse_closed_set, valuation_upper
from qlattice.spectral import fuel_for_accuracy

A = BoundedOperator.finite(
    {(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 4), (1, 1): Fraction(-1, 4), (1, 2): Fraction(1, 8), (2, 2): 0},
    size=3,
)
x = Vector({0: Fraction(2, 3), 1: Fraction(1, 3), 2: Fraction(2, 3)})

M = np.array([[float(A.entry(i, j).re) for j in range(3)] for i in range(3)])
eigs, vecs = np.linalg.eigh(M)
weights = np.abs(vecs.T @ np.array([2 / 3, 1 / 3, 2 / 3])) ** 2
print("eigenvalues (float):", np.round(eigs, 6))
print("spectral weights of x (float):", np.round(weights, 6))

hinge = PLFunction([(-1, 0), (0, 0), (1, 1)])
iv = integral(A, x, hinge, Fraction(1, 2**30))
print("\nintegral of max(t, 0):", float(iv.lo), "..", float(iv.hi))
print("float reference:       ", float(np.sum(np.maximum(eigs, 0) * weights)))

C = parse_closed_set("[0,1]")
# the float spectrum stays more than 1/100 away from the boundary point 0
gap = Fraction(1, 100)
fuel = fuel_for_accuracy(gap, Fraction(1, 2**10))
bounds = valuation_upper(A, x, C, fuel).prefix(fuel + 1)
print(f"\nupper bounds for nu_A(x)([0,1]) with fuel {fuel}:")
print("  ", [str(b) for b in bounds])
print("float reference:", float(np.sum(weights[eigs >= 0])))
