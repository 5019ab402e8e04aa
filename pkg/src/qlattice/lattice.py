"""Closed subspaces of l2: generator presentations, certificate codes and the
operations that stay continuous on them.

A closed subspace ``L`` is coded by the stream of all certificates ``(c, r)``,
``c`` a rational unit vector and ``0 <= r < 1`` rational, for which the unit ball
of ``L`` avoids the closed half space ``{x : Re<c,x> >= sqrt(1 - r^2)}``.  That
is the case exactly when ``d(c, L) > r``, so the same stream codes the distance
function of ``L`` as well.

Join and biorthogonal closure are deliberately absent: neither is continuous
on codes.  :func:`ortho_complement_finite` exists only as a test oracle inside a
finite ambient space.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .arith import DomainError, GaussianRational, Semidecision
from .hilbert import (
    OrthogonalFamily,
    Vector,
    combine,
    distance_sq,
    gram_schmidt,
    inner_product,
    nullspace,
    project,
    projection_norm2,
)

TailBound = Callable[[int, Vector], Fraction]


class Subspace:
    """The closed linear span of a list of generators.

    A finite presentation holds the generators directly.  A countable one
    holds an enumerator ``n -> generator`` (``None`` once exhausted) and,
    optionally, a tail bound ``t(n, c)`` with ``d(c, L) >= d(c, L_n) - t(n, c)``
    for unit ``c``, where ``L_n`` is the span of the first ``n`` generators.
    """

    def __init__(
        self,
        generators: Iterable[Vector] = (),
        *,
        enumerator: Callable[[int], Optional[Vector]] | None = None,
        tail_bound: TailBound | None = None,
    ):
        if enumerator is None:
            self._generators: tuple[Vector, ...] | None = tuple(generators)
            for g in self._generators:
                if not isinstance(g, Vector):
                    raise DomainError(f"generator is not a Vector: {g!r}")
        else:
            self._generators = None
        self._enumerator = enumerator
        self.tail_bound = tail_bound
        self._family: OrthogonalFamily | None = None

    @classmethod
    def span(cls, *generators: Vector) -> "Subspace":
        return cls(generators)

    @classmethod
    def zero(cls) -> "Subspace":
        return cls(())

    @classmethod
    def countable(
        cls,
        enumerator: Callable[[int], Optional[Vector]],
        tail_bound: TailBound | None = None,
    ) -> "Subspace":
        return cls(enumerator=enumerator, tail_bound=tail_bound)

    @property
    def is_finite(self) -> bool:
        return self._generators is not None

    @property
    def generators(self) -> tuple[Vector, ...]:
        if self._generators is None:
            raise DomainError("countably generated subspace has no finite generator list")
        return self._generators

    def generator(self, n: int) -> Optional[Vector]:
        if self._generators is not None:
            return self._generators[n] if n < len(self._generators) else None
        return self._enumerator(n)

    def truncation(self, n: int) -> "Subspace":
        """Span of the first ``n`` generators."""
        gens = []
        for k in range(n):
            g = self.generator(k)
            if g is None:
                break
            gens.append(g)
        return Subspace(gens)

    def family(self) -> OrthogonalFamily:
        """Orthogonal basis (finite presentations only)."""
        if self._family is None:
            self._family = gram_schmidt(self.generators)
        return self._family

    @property
    def dim(self) -> int:
        return len(self.family())

    def contains(self, x: Vector) -> bool:
        return distance_sq(x, self.family()) == 0

    def __repr__(self):
        if self._generators is None:
            return "Subspace(<countable>)"
        return f"Subspace({list(self._generators)!r})"


def same_subspace(a: Subspace, b: Subspace) -> bool:
    """Equality of finite spans by mutual containment."""
    fa, fb = a.family(), b.family()
    return len(fa) == len(fb) and all(distance_sq(v, fb) == 0 for v in fa)


def is_subspace_of(a: Subspace, b: Subspace) -> bool:
    fb = b.family()
    return all(distance_sq(v, fb) == 0 for v in a.generators)


# ---------------------------------------------------------------------------
# certificates


def _check_unit(c: Vector, what: str = "c") -> None:
    if c.norm2() != 1:
        raise DomainError(f"{what} must have norm exactly 1, has norm^2 {c.norm2()}")


def _check_radius(r: Fraction) -> None:
    if not (0 <= r < 1):
        raise DomainError(f"radius must lie in [0, 1), got {r}")


@dataclass(frozen=True)
class Certificate:
    """A rational unit centre and a radius ``0 <= r < 1``."""

    c: Vector
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        _check_unit(self.c)
        _check_radius(self.r)


def certificate_valid(L: Subspace, c: Vector, r) -> bool:
    """Whether the unit ball of ``L`` lies in the open half space ``H_{c,r}``.

    Over unit ``y`` in ``L`` the largest value of ``Re<c, y>`` is ``|P_L c|``, so
    containment holds iff ``|P_L c|^2 < 1 - r^2``; this is the same as
    ``r^2 < d(c, L)^2``.
    """
    r = Fraction(r)
    _check_unit(c)
    _check_radius(r)
    return projection_norm2(c, L.family()) < 1 - r * r


@dataclass(frozen=True)
class HalfspaceTests:
    in_closed_ball_scaled: bool
    in_halfspace: bool
    side: int  # +1 if x is in h_{c,r}, -1 if -x is, 0 if neither


def halfspace_tests(c: Vector, r, x: Vector) -> HalfspaceTests:
    """Ball and half-space tests for unit ``c`` and ``x``.

    ``in_closed_ball_scaled``: some ``lam`` in [-1, 1] has ``|c - lam x| <= r``.
    The quadratic ``|c - lam x|^2 = lam^2 - 2 lam Re<c,x> + 1`` is smallest at
    ``lam = Re<c,x>``, which already lies in [-1, 1], so the vector
    ``c - Re<c,x> x`` is measured directly.

    ``in_halfspace``: ``x`` or ``-x`` lies in ``h_{c,r}``, i.e.
    ``Re<c,x>^2 >= 1 - r^2``; ``side`` records which one.
    """
    r = Fraction(r)
    _check_unit(c)
    _check_unit(x, "x")
    _check_radius(r)
    a = inner_product(c, x).re
    residual = c - x.scale(a)
    in_ball = residual.norm2() <= r * r
    in_half = a * a >= 1 - r * r
    side = 0
    if in_half:
        side = 1 if a > 0 else -1
    return HalfspaceTests(in_ball, in_half, side)


# ---------------------------------------------------------------------------
# candidate enumeration


def _gaussian_integers_of_norm(n: int) -> list[tuple[int, int]]:
    out = []
    a_max = math.isqrt(n)
    for a in range(-a_max, a_max + 1):
        b2 = n - a * a
        b = math.isqrt(b2)
        if b * b == b2:
            out.append((a, b))
            if b:
                out.append((a, -b))
    out.sort(key=lambda ab: (abs(ab[0]) + abs(ab[1]), -ab[0], -ab[1]))
    return out


def _unit_vectors(q: int, top: int) -> Iterator[Vector]:
    """Primitive ``z / q`` with ``z`` in Z[i]^(top+1), ``|z|^2 = q^2``, ``z_top != 0``."""
    target = q * q

    def rec(idx: int, remaining: int, acc: list[tuple[int, int]]):
        if idx == top:
            if remaining == 0:
                return
            for ab in _gaussian_integers_of_norm(remaining):
                yield acc + [ab]
            return
        for n in range(0, remaining):
            for ab in _gaussian_integers_of_norm(n) if n else [(0, 0)]:
                yield from rec(idx + 1, remaining - n, acc + [ab])

    for z in rec(0, target, []):
        g = q
        for a, b in z:
            g = math.gcd(g, a, b)
        if g != 1:
            continue
        yield Vector._raw(
            {k: GaussianRational(Fraction(a, q), Fraction(b, q)) for k, (a, b) in enumerate(z)}
        )


def _center_stream() -> Iterator[Vector]:
    for level in itertools.count(1):
        for top in range(level):
            yield from _unit_vectors(level - top, top)


class _Memo:
    """Lazily materialised prefix of an infinite deterministic stream."""

    def __init__(self, factory):
        self._it = factory()
        self._items: list = []

    def __getitem__(self, i: int):
        while len(self._items) <= i:
            self._items.append(next(self._it))
        return self._items[i]


_CENTERS = _Memo(_center_stream)


def center(i: int) -> Vector:
    """The ``i``-th certificate centre.

    Centres are the rational unit vectors ``z/q``, ``z`` a primitive Gaussian
    integer vector, grouped by level ``q + (largest index)``; inside a level by
    largest index, then by the order of the entries.
    """
    return _CENTERS[i]


def _radius_stream() -> Iterator[Fraction]:
    yield Fraction(0)
    for q in itertools.count(2):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)


_RADII = _Memo(_radius_stream)


def radius(j: int) -> Fraction:
    """The ``j``-th radius: 0, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ..."""
    return _RADII[j]


def dovetail_candidates() -> Iterator[tuple[Vector, Fraction]]:
    """All pairs ``(center(i), radius(j))`` in Cantor order of ``(i, j)``."""
    for s in itertools.count():
        for i in range(s + 1):
            yield center(i), radius(s - i)


# ---------------------------------------------------------------------------
# codes

# Accepts(c, r, stage): a sound test of ``d(c, L) > r`` that may use truncation
# level ``stage``.
Accepts = Callable[[Vector, Fraction, int], bool]

SHARP_DEPTH_STEP = 4


class SubspaceCode:
    """The certificate stream of a closed subspace.

    The stream is organised in stages ``s = 0, 1, 2, ...``.  Stage ``s`` has
    two parts:

    * base slots: the candidates ``(center(i), radius(j))`` with ``i + j = s``
      (for codes whose acceptance depends on the stage, every candidate with
      ``i + j <= s`` not yet emitted is retried);
    * sharp slots: for each centre ``a <= s`` the largest radius
      ``k / 2**b`` with ``b = SHARP_DEPTH_STEP * (s - a + 1)`` that is accepted.

    Each slot yields a :class:`Certificate` or ``None``, so the stream never
    stalls even when no certificate exists.  Every accepted base candidate is
    emitted, which makes the code fair.
    """

    def __init__(self, accepts: Accepts, *, staged: bool = False):
        self._accepts = accepts
        self._staged = staged

    def slots(self) -> Iterator[tuple[str, Optional[Certificate]]]:
        """``(kind, certificate-or-None)`` with kind ``"base"`` or ``"sharp"``."""
        pending: list[tuple[int, int]] = []
        for s in itertools.count():
            if self._staged:
                pending.extend((i, s - i) for i in range(s + 1))
                still = []
                for i, j in pending:
                    c, r = center(i), radius(j)
                    if self._accepts(c, r, s):
                        yield "base", Certificate(c, r)
                    else:
                        still.append((i, j))
                        yield "base", None
                pending = still
            else:
                for i in range(s + 1):
                    c, r = center(i), radius(s - i)
                    yield "base", (Certificate(c, r) if self._accepts(c, r, s) else None)
            for a in range(s + 1):
                yield "sharp", self._sharp(center(a), SHARP_DEPTH_STEP * (s - a + 1), s)

    def _sharp(self, c: Vector, depth: int, stage: int) -> Optional[Certificate]:
        scale = 2**depth
        if not self._accepts(c, Fraction(0), stage):
            return None
        lo, hi = 0, scale - 1  # accepted at lo; find the largest accepted k
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._accepts(c, Fraction(mid, scale), stage):
                lo = mid
            else:
                hi = mid - 1
        return Certificate(c, Fraction(lo, scale))

    def stream(self) -> Iterator[Optional[Certificate]]:
        for _, cert in self.slots():
            yield cert

    def certificates(self) -> Iterator[Certificate]:
        """Only the emitted certificates.  Blocks forever if there are none."""
        return (c for c in self.stream() if c is not None)

    def take(self, n: int) -> list[Certificate]:
        return list(itertools.islice(self.certificates(), n))


def _finite_acceptor(L: Subspace) -> Accepts:
    family = L.family()
    cache: dict[Vector, Fraction] = {}

    def accepts(c: Vector, r: Fraction, stage: int) -> bool:
        p2 = cache.get(c)
        if p2 is None:
            p2 = cache[c] = projection_norm2(c, family)
        return p2 < 1 - r * r

    return accepts


def _countable_acceptor(L: Subspace) -> Accepts:
    gens: list[Vector] = []
    families: list[OrthogonalFamily] = [gram_schmidt([])]
    exhausted = False

    def family_at(n: int) -> tuple[OrthogonalFamily, bool]:
        nonlocal exhausted
        while len(families) <= n and not exhausted:
            g = L.generator(len(gens))
            if g is None:
                exhausted = True
                break
            gens.append(g)
            families.append(gram_schmidt(gens))
        k = min(n, len(families) - 1)
        return families[k], exhausted and k == len(families) - 1

    def accepts(c: Vector, r: Fraction, stage: int) -> bool:
        n = stage + 1
        fam, complete = family_at(n)
        d2 = distance_sq(c, fam)
        if complete:
            return r * r < d2
        if L.tail_bound is None:
            return False
        t = r + Fraction(L.tail_bound(n, c))
        return t < 0 or t * t < d2

    return accepts


def encode(L: Subspace) -> SubspaceCode:
    """The certificate code of ``L``.

    For a finite presentation a candidate is emitted iff it is valid.  For a
    countable presentation the candidate must be provable at the current
    truncation, ``r + t(n, c) < d(c, L_n)``; without a tail bound nothing can
    be proved and the code stays empty unless the enumerator runs out.
    """
    if L.is_finite:
        return SubspaceCode(_finite_acceptor(L))
    return SubspaceCode(_countable_acceptor(L), staged=True)


def code_from_distance(distance_sq_of: Callable[[Vector], Fraction]) -> SubspaceCode:
    """Code of a distance function given as exact squared distances.

    This is the other side of the correspondence: pairs with ``r < d(c)``.
    """
    cache: dict[Vector, Fraction] = {}

    def accepts(c: Vector, r: Fraction, stage: int) -> bool:
        d2 = cache.get(c)
        if d2 is None:
            d2 = cache[c] = Fraction(distance_sq_of(c))
        return r * r < d2

    return SubspaceCode(accepts)


def semidecide_not_member(code: SubspaceCode, x: Vector) -> Semidecision:
    """Semidecide ``x not in L`` from a code of ``L``.

    A valid certificate ``(c, r)`` keeps every unit vector of ``L`` inside
    ``|Re<c, y>| < sqrt(1 - r^2)``.  ``L`` is closed under phases, so then also
    ``|<c, y>| < sqrt(1 - r^2)``, and a unit ``x/|x|`` with
    ``|<c, x/|x|>|^2 >= 1 - r^2`` is not in ``L``.  The test is invariant
    under every nonzero complex scaling of ``x``.  Fuel counts code slots.
    """
    if x.is_zero():
        raise DomainError("the zero vector belongs to every closed subspace")
    n2 = x.norm2()

    def refutes(cert: Optional[Certificate]) -> bool:
        if cert is None:
            return False
        return inner_product(cert.c, x).abs2() >= (1 - cert.r * cert.r) * n2

    return Semidecision.from_steps(lambda: (refutes(c) for c in code.stream()))


# ---------------------------------------------------------------------------
# finite lattice operations


def meet(L1: Subspace, L2: Subspace) -> Subspace:
    """``L1 cap L2`` for finite presentations.

    With an orthogonal basis ``u`` of the smaller space, ``sum a_i u_i`` lies
    in the other space iff ``sum a_i (u_i - P u_i) = 0``, where ``P`` projects
    onto the other space; the kernel of that map parametrises the meet.
    """
    small, large = (L1, L2) if L1.dim <= L2.dim else (L2, L1)
    U = list(small.family())
    if not U or not large.dim:
        return Subspace.zero()
    fam = large.family()
    residuals = [u - project(u, fam) for u in U]
    if all(r.is_zero() for r in residuals):
        return Subspace(U)
    gens = []
    for sol in nullspace(residuals):
        w = combine(sol, U)
        if not w.is_zero():
            gens.append(w)
    return Subspace(gram_schmidt(gens).vectors)


def ortho_complement_finite(L: Subspace, ambient_dim: int) -> Subspace:
    """Orthogonal complement of ``L`` inside ``span(e_0, ..., e_{ambient_dim-1})``.

    A test oracle only; orthocomplementation is not continuous on codes.
    """
    for g in L.generators:
        if g.max_index >= ambient_dim:
            raise DomainError(
                f"generator supported at index {g.max_index} outside ambient dimension {ambient_dim}"
            )
    family = L.family()
    out: list[Vector] = []
    for k in range(ambient_dim):
        e = Vector.basis(k)
        w = e
        for b, nb in zip(family.vectors, family.norms2):
            coeff = inner_product(b, e) / nb
            if coeff:
                w = w - b.scale(coeff)
        out.append(w)
    return Subspace(gram_schmidt(out).vectors)
