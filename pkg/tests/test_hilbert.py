import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gen import distance_sq_normal_equations, random_subspace, random_unit, random_vector
from qlattice.arith import DomainError, GaussianRational, RationalInterval, interval_sqrt
from qlattice.hilbert import (
    OrthogonalFamily,
    Vector,
    distance_sq,
    gram_schmidt,
    inner_product,
    nullspace,
    project,
    rank,
    rationalize_unit,
)

e = [Vector.basis(i) for i in range(4)]
seeds = st.integers(0, 2**32 - 1)


def to_numpy(v: Vector, n: int = 10) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    for k, z in v.items():
        out[k] = float(z.re) + 1j * float(z.im)
    return out


def test_inner_product_examples():
    assert inner_product(e[0], e[1]) == 0
    assert inner_product(e[0].scale(GaussianRational(1, 1)), e[0]) == GaussianRational(1, -1)
    x = Vector({0: GaussianRational(1, 2), 3: -4})
    ip = inner_product(x, x)
    assert ip.is_real() and ip.re == x.norm2() == 21


def test_vector_basics():
    v = Vector({2: 1, 0: GaussianRational(0, 1), 5: 0})
    assert v.support == (0, 2) and v.max_index == 2
    assert v - v == Vector() and not (v - v)
    assert (v + v) == v.scale(2) == 2 * v
    assert v / 2 * 2 == v
    assert Vector().max_index == -1
    with pytest.raises(DomainError):
        Vector({-1: 1})
    with pytest.raises(DomainError):
        v / 0


def test_gram_schmidt_examples():
    f = gram_schmidt([e[0], e[0] + e[1]])
    assert len(f) == 2 and inner_product(f[0], f[1]) == 0
    assert list(gram_schmidt([e[0], e[0].scale(2)])) == [e[0]]
    f = gram_schmidt([e[0] + e[1], e[1] + e[2], e[0] + e[1].scale(2) + e[2]])
    assert len(f) == 2 == rank([e[0] + e[1], e[1] + e[2], e[0] + e[1].scale(2) + e[2]])


def test_distance_examples():
    assert distance_sq(e[0], gram_schmidt([e[1]])) == 1
    assert distance_sq(e[0], gram_schmidt([e[0] + e[1]])) == Fraction(1, 2)
    c = Vector({0: 3, 1: GaussianRational(0, 4)})
    assert distance_sq(c, gram_schmidt([])) == c.norm2() == 25


def test_orthogonal_family_rejects():
    with pytest.raises(DomainError):
        OrthogonalFamily([e[0], e[0] + e[1]])
    with pytest.raises(DomainError):
        OrthogonalFamily([Vector()])


def test_rationalize_unit_examples():
    for eps in (Fraction(1, 2), Fraction(1, 10**6)):
        assert rationalize_unit(e[0], eps) == e[0]
    assert rationalize_unit(e[0].scale(3) + e[1].scale(4), Fraction(1, 10**9)) == Vector(
        {0: Fraction(3, 5), 1: Fraction(4, 5)}
    )
    u = rationalize_unit(e[0] + e[1], Fraction(1, 10))
    assert u == Vector({0: Fraction(21, 29), 1: Fraction(20, 29)})
    assert u.norm2() == 1
    # |u - x/|x||^2 = 2 - 2a/sqrt(2) < 1/100  iff  a^2 > 2 (199/200)^2
    a = inner_product(u, e[0] + e[1]).re
    assert a > 0 and a * a > 2 * Fraction(199, 200) ** 2


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([Fraction(1, 2), Fraction(1, 100), Fraction(1, 10**5)]))
def test_rationalize_unit_exact_and_close(seed, eps):
    rng = random.Random(seed)
    x = random_vector(rng, 6, 9)
    u = rationalize_unit(x, eps)
    assert u.norm2() == 1
    xn = to_numpy(x)
    assert np.linalg.norm(to_numpy(u) - xn / np.linalg.norm(xn)) < float(eps) + 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_cauchy_schwarz(seed):
    rng = random.Random(seed)
    x, y = random_vector(rng), random_vector(rng)
    assert inner_product(x, y).abs2() <= x.norm2() * y.norm2()
    assert inner_product(x, y) == inner_product(y, x).conjugate()


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_distance_matches_normal_equations(seed):
    rng = random.Random(seed)
    L = random_subspace(rng)
    c = random_vector(rng)
    d2 = distance_sq(c, gram_schmidt(L.generators))
    assert d2 == distance_sq_normal_equations(c, L.generators)
    assert d2 >= 0
    # floating cross-check
    if L.generators:
        M = np.array([to_numpy(g) for g in L.generators]).T
        coef, *_ = np.linalg.lstsq(M, to_numpy(c), rcond=None)
        assert abs(np.linalg.norm(M @ coef - to_numpy(c)) ** 2 - float(d2)) < 1e-6


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_distance_zero_iff_in_span(seed):
    rng = random.Random(seed)
    L = random_subspace(rng)
    fam = gram_schmidt(L.generators)
    coeffs = [GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in L.generators]
    inside = Vector()
    for a, g in zip(coeffs, L.generators):
        inside = inside + g.scale(a)
    assert distance_sq(inside, fam) == 0
    c = random_vector(rng)
    in_span = nullspace(list(L.generators) + [c]) and any(sol[-1] for sol in nullspace(list(L.generators) + [c]))
    assert (distance_sq(c, fam) == 0) == bool(in_span)
    assert distance_sq(c - project(c, fam), fam) == distance_sq(c, fam)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_distance_one_lipschitz(seed):
    rng = random.Random(seed)
    fam = gram_schmidt(random_subspace(rng).generators)
    a, b = random_unit(rng), random_unit(rng)
    eps = Fraction(1, 2**30)
    da = interval_sqrt(RationalInterval.point(distance_sq(a, fam)), eps)
    db = interval_sqrt(RationalInterval.point(distance_sq(b, fam)), eps)
    gap = interval_sqrt(RationalInterval.point((a - b).norm2()), eps)
    assert abs(da.mid - db.mid) <= gap.hi + 2 * eps
