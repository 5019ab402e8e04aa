"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with its instance count and wall time."""
import itertools
import random
import time
from fractions import Fraction

import pytest

from conftest import SEED
from gen import (
    distance_sq_normal_equations,
    householder_orthonormal,
    random_radius,
    random_subspace,
    random_unit,
    random_vector,
)
from qlattice.arith import RationalInterval
from qlattice.hilbert import Vector, project
from qlattice.lattice import (
    Certificate,
    Subspace,
    certificate_valid,
    dovetail_candidates,
    encode,
    halfspace_tests,
    ortho_complement_finite,
)
from qlattice.spectral import (
    BoundedOperator,
    ClosedRationalSet,
    PLFunction,
    diagonal_oracle,
    fuel_for_accuracy,
    integral,
    valuation_upper,
)
from qlattice.states import PureState, State, check_additivity, mixed_eval, pure_eval
from qlattice.topology import (
    OperatorSequence,
    demo_biorth_discontinuity,
    demo_join_discontinuity,
    demo_schroeder,
    sot_check,
)


@pytest.fixture
def verdict(capsys):
    """Print ``PASS``/``FAIL`` for a criterion, then assert it."""

    def report(number, title, ok, count, started, limit):
        elapsed = time.perf_counter() - started
        passed = ok and elapsed < limit
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'} criterion {number}: {title} "
                  f"[{count} instances, {elapsed:.1f}s of {limit}s]")
        assert ok, f"criterion {number} failed"
        assert elapsed < limit, f"criterion {number} took {elapsed:.1f}s"

    return report


def rng_for(n):
    return random.Random(SEED * 100 + n)


# 1 ---------------------------------------------------------------------------------


def boundary_instances(rng, count):
    """``(L, c, r)`` with ``r`` equal to the distance: the coordinate subspace
    missing one real coordinate ``j`` of ``c`` sits at distance ``|c_j|``."""
    out = []
    while len(out) < count:
        c = random_unit(rng)
        for j, z in c.items():
            if z.im == 0 and 0 < abs(z.re) < 1:
                L = Subspace([Vector.basis(i) for i in range(10) if i != j])
                out.append((L, c, abs(z.re)))
                break
    return out


def test_criterion_1_certificate_equivalence(verdict):
    rng = rng_for(1)
    started = time.perf_counter()
    cases = [(random_subspace(rng), random_unit(rng), random_radius(rng)) for _ in range(500)]
    cases += boundary_instances(rng, 40)
    bad = 0
    for L, c, r in cases:
        d2 = distance_sq_normal_equations(c, L.generators)
        bad += certificate_valid(L, c, r) != (r * r < d2)
    boundary_rejected = all(not certificate_valid(L, c, r) for L, c, r in cases[500:])
    verdict(1, "certificate_valid iff r^2 < d^2", bad == 0 and boundary_rejected, len(cases), started, 60)


# 2 ---------------------------------------------------------------------------------


def test_criterion_2_halfspace_coherence(verdict):
    rng = rng_for(2)
    started = time.perf_counter()
    bad = 0
    n = 600
    for k in range(n):
        c, x = random_unit(rng, 5, 4), random_unit(rng, 5, 4)
        if k % 5 == 0:
            # x = c: the inside case, where both tests must say yes
            x = c
        r = random_radius(rng)
        t = halfspace_tests(c, r, x)
        bad += t.in_closed_ball_scaled != t.in_halfspace
    verdict(2, "half-space tests agree", bad == 0, n, started, 30)


# 3 ---------------------------------------------------------------------------------


def test_criterion_3_code_identity(verdict):
    rng = rng_for(3)
    started = time.perf_counter()
    window = list(itertools.islice(dovetail_candidates(), 1000))
    ok = True
    for _ in range(50):
        L = random_subspace(rng)
        certs, emitted, n_base = [], set(), 0
        for kind, cert in encode(L).slots():
            n_base += kind == "base"
            if cert is not None:
                certs.append(cert)
                emitted.add(cert)
            if n_base >= len(window) and len(certs) >= 100:
                break
        ok &= all(certificate_valid(L, c.c, c.r) for c in certs[:100])
        ok &= all(Certificate(c, r) in emitted for c, r in window if certificate_valid(L, c, r))
    verdict(3, "first 100 certificates valid, 1000 dovetail slots complete", ok, 50, started, 300)


# 4 ---------------------------------------------------------------------------------


def random_orthogonal_pair(rng, ambient=6):
    P = random_subspace(rng, 3, ambient, 3)
    comp = ortho_complement_finite(P, ambient)
    gens = []
    for _ in range(rng.randint(0, 3)):
        w = project(random_vector(rng, ambient, 3), comp.family())
        if w:
            gens.append(w)
    return P, Subspace(gens)


def random_finite_state(rng, ambient=6):
    bs = householder_orthonormal(rng, ambient, rng.randint(1, 4))
    ws = [Fraction(rng.randint(1, 7)) for _ in bs]
    return State.finite([(w / sum(ws), b) for w, b in zip(ws, bs)])


def geometric_state():
    return State.geometric(lambda n: (Fraction(1, 2 ** (n + 1)), Vector.basis(n)), Fraction(1, 2))


def test_criterion_4_state_laws(verdict):
    rng = rng_for(4)
    started = time.perf_counter()
    ok = True
    count = 0
    # (S1) on pure, finite and geometric states
    for _ in range(50):
        x = random_unit(rng, 6, 4)
        ok &= pure_eval(PureState(x), Subspace.zero()) == 0
        ok &= pure_eval(PureState(x), Subspace([Vector.basis(i) for i in range(6)])) == 1
        S = random_finite_state(rng)
        ok &= mixed_eval(S, Subspace.zero(), S.length) == RationalInterval(0, 0)
        ok &= mixed_eval(S, Subspace([Vector.basis(i) for i in range(6)]), S.length) == RationalInterval(1, 1)
        count += 2
    G = geometric_state()
    for n in range(1, 30):
        cover = Subspace([Vector.basis(k) for k in range(n)])
        ok &= mixed_eval(G, Subspace.zero(), n) == RationalInterval(0, G.tail(n))
        ok &= mixed_eval(G, cover, n) == RationalInterval(1 - G.tail(n), 1)
        count += 1
    # (S3) on orthogonal pairs
    for _ in range(220):
        P, Q = random_orthogonal_pair(rng)
        for S in (PureState(random_unit(rng, 6, 4)), random_finite_state(rng)):
            rep = check_additivity(S, P, Q)
            ok &= rep.holds and rep.s_P + rep.s_Q == rep.s_join
        count += 1
    # (S2) decreasing chains
    for _ in range(100):
        gens = [random_vector(rng, 8, 3) for _ in range(rng.randint(1, 7))]
        chain = [Subspace(gens[k:]) for k in range(len(gens) + 1)]
        x = PureState(random_unit(rng, 8, 4))
        values = [pure_eval(x, L) for L in chain]
        ok &= all(a >= b for a, b in zip(values, values[1:])) and values[-1] == 0
        count += 1
    verdict(4, "state laws (S1), (S2), (S3)", ok, count, started, 60)


# 5, 6 --------------------------------------------------------------------------------


def random_diagonal(rng):
    eigs = [Fraction(rng.randint(-12, 12), 12) for _ in range(rng.randint(1, 8))]
    return eigs, BoundedOperator.diagonal(eigs)


def boundary_free_set(rng):
    """Endpoints are odd multiples of 1/40; eigenvalues are multiples of 1/12,
    so no eigenvalue is within 1/120 of a boundary point."""
    pts = sorted({Fraction(2 * rng.randint(-20, 19) + 1, 40) for _ in range(rng.randint(1, 6))})
    comps = []
    while pts:
        a = pts.pop(0)
        if pts and rng.random() < 0.75:
            comps.append((a, pts.pop(0)))
        else:
            comps.append((a, a))
    return ClosedRationalSet(comps)


GAP = Fraction(1, 120)


def test_criterion_5_valuation_against_oracle(verdict):
    rng = rng_for(5)
    started = time.perf_counter()
    accuracy = Fraction(1, 2**10)
    fuel = fuel_for_accuracy(GAP, accuracy)
    ok = True
    n = 80
    for _ in range(n):
        eigs, A = random_diagonal(rng)
        x = random_unit(rng, len(eigs), 4)
        C = boundary_free_set(rng)
        oracle = diagonal_oracle(eigs, x, C)
        bounds = valuation_upper(A, x, C, fuel).prefix(fuel + 1)
        ok &= all(b >= oracle for b in bounds) and bounds[-1] - oracle <= accuracy
    verdict(5, f"valuation_upper sound and within 2^-10 by fuel {fuel}", ok, n, started, 600)


def test_criterion_6_valuation_laws(verdict):
    rng = rng_for(6)
    started = time.perf_counter()
    eps = Fraction(1, 2**8)
    fuel = fuel_for_accuracy(GAP, eps)
    ok = True
    n = 60
    for _ in range(n):
        eigs, A = random_diagonal(rng)
        x = random_unit(rng, len(eigs), 4)
        ok &= set(valuation_upper(A, x, ClosedRationalSet.empty(), fuel).prefix(fuel + 1)[1:]) == {0}
        ok &= set(valuation_upper(A, x, ClosedRationalSet.full(), fuel).prefix(fuel + 1)) == {1}
        C, D = boundary_free_set(rng), boundary_free_set(rng)

        def nu(S):
            return valuation_upper(A, x, S, fuel).prefix(fuel + 1)[-1]

        defect = abs(nu(C.union(D)) + nu(C.intersection(D)) - nu(C) - nu(D))
        ok &= defect <= 4 * eps
    verdict(6, "(O1) exact, (O3) modularity defect <= 4 eps", ok, n, started, 300)


# 7 ------------------------------------------------------------------------------------


def test_criterion_7_functional_calculus(verdict):
    rng = rng_for(7)
    started = time.perf_counter()
    ok = True
    n = 250
    for _ in range(n):
        eigs, A = random_diagonal(rng)
        x = random_unit(rng, len(eigs), 4)
        ts = sorted({Fraction(rng.randint(-16, 16), 16) for _ in range(rng.randint(1, 6))})
        f = PLFunction([(t, Fraction(rng.randint(-8, 8), 4)) for t in ts])
        iv = integral(A, x, f, Fraction(1, 2 ** rng.randint(4, 40)))
        oracle = sum((z.abs2() * f(eigs[i]) for i, z in x.items()), Fraction(0))
        ok &= oracle in iv and abs(iv.mid - oracle) <= iv.width / 2
    verdict(7, "integral encloses the diagonal oracle", ok, n, started, 300)


# 8 ------------------------------------------------------------------------------------


def test_criterion_8_counterexamples(verdict):
    started = time.perf_counter()
    sch = demo_schroeder(50)
    ok = sch.all_half and [v for _, v in sch.values] == [Fraction(1, 2)] * 50 and sch.limit_value == 0
    join = demo_join_discontinuity(49, K=50)
    ok &= join.zero_below_K and len(join.meets) == 50 and join.contained_in_limit
    bio = demo_biorth_discontinuity(100)
    ok &= len(bio.lines) == 100 and all(line for _, line in bio.lines) and bio.intersection_empty
    verdict(8, "Schroeder, join and biorthogonal counterexamples", ok, 3, started, 60)


# 9 ------------------------------------------------------------------------------------


def test_criterion_9_sot(verdict):
    rng = rng_for(9)
    started = time.perf_counter()
    ok = True
    n = 100
    for k in range(n):
        x = random_unit(rng, 8, 4) if k % 2 else random_vector(rng, 8, 5)
        top = x.max_index
        eps = min(Fraction(1, 10**6), abs(x[top].re) + abs(x[top].im)) / 2
        left = sot_check(OperatorSequence.left_shift_powers(), None, [x], eps, top + 5)
        ok &= left.verdict == "converged" and left.n0 == top + 1
        if x.norm2() == 1:
            right = sot_check(OperatorSequence.right_shift_powers(), None, [x], Fraction(1, 2), 16)
            ok &= right.verdict == "not converged"
    verdict(9, "left shifts converge at max index + 1, right shifts never", ok, n, started, 10)
