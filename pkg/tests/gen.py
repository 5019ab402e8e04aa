"""Random exact instances and independent oracles shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction

from qlattice.arith import GaussianRational
from qlattice.hilbert import Vector, inner_product, rref
from qlattice.lattice import Subspace


def gaussian_int(rng: random.Random, height: int, complex_: bool = True) -> GaussianRational:
    im = rng.randint(-height, height) if complex_ else 0
    return GaussianRational(rng.randint(-height, height), im)


def random_vector(rng, support: int = 10, height: int = 8, nonzero: bool = True, complex_=True) -> Vector:
    while True:
        k = rng.randint(1, support)
        idx = rng.sample(range(support), k)
        v = Vector({i: gaussian_int(rng, height, complex_) for i in idx})
        if v or not nonzero:
            return v


def random_subspace(rng, max_dim: int = 6, support: int = 10, height: int = 8) -> Subspace:
    d = rng.randint(0, max_dim)
    return Subspace([random_vector(rng, support, height) for _ in range(d)])


def random_unit(rng, support: int = 10, height: int = 6) -> Vector:
    """Exact unit vector by inverse stereographic projection of a random
    Gaussian-rational point (independent of the library's rationalizer)."""
    k = rng.randint(1, support)
    idx = rng.sample(range(support), k)
    pole = idx[0]
    s = {i: GaussianRational(Fraction(rng.randint(-height, height), rng.randint(1, height)),
                             Fraction(rng.randint(-height, height), rng.randint(1, height)))
         for i in idx[1:]}
    s2 = sum((z.abs2() for z in s.values()), Fraction(0))
    out = {i: z * (Fraction(2) / (1 + s2)) for i, z in s.items()}
    sign = rng.choice([1, -1])
    out[pole] = GaussianRational(sign * (1 - s2) / (1 + s2))
    v = Vector(out)
    assert v.norm2() == 1
    return v


def random_radius(rng, max_den: int = 12) -> Fraction:
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(0, q - 1), q)


def distance_sq_normal_equations(c: Vector, gens) -> Fraction:
    """``|c|^2 - <c, P c>`` with ``P c`` from the Gram system ``G a = (<g_i, c>)``.

    Solved by exact row reduction, independently of Gram-Schmidt.
    """
    gens = [g for g in gens if g]
    if not gens:
        return c.norm2()

    n = len(gens)
    rows = [
        [inner_product(gens[i], gens[j]) for j in range(n)] + [inner_product(gens[i], c)]
        for i in range(n)
    ]
    m, pivots = rref(rows)
    if n in pivots:
        raise AssertionError("inconsistent normal equations")
    coeffs = [GaussianRational(0)] * n
    for row, p in zip(m, pivots):
        coeffs[p] = row[n]
    pc = Vector()
    for a, g in zip(coeffs, gens):
        pc = pc + g.scale(a)
    return c.norm2() - inner_product(c, pc).re


def householder_orthonormal(rng, dim: int, count: int, height: int = 5):
    """``count`` exactly orthonormal rational vectors in ``span(e_0..e_{dim-1})``.

    Columns of a product of rational Householder reflections ``I - 2 v v*/|v|^2``.
    """
    basis = [Vector.basis(i) for i in range(dim)]
    for _ in range(2):
        v = random_vector(rng, dim, height, complex_=False)
        n2 = v.norm2()

        basis = [b - v.scale(2 * inner_product(v, b) / n2) for b in basis]
    rng.shuffle(basis)
    return basis[:count]
