"""Finitely supported vectors of l2 with Gaussian-rational entries.

Everything here is exact.  Orthogonal families are kept unnormalised so that
projections and distances stay rational: the squared distance from ``c`` to the
span of an orthogonal family ``b_1..b_k`` is

    |c|^2 - sum_i |<b_i, c>|^2 / |b_i|^2
"""
from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .arith import (
    ZERO,
    DomainError,
    GaussianRational,
    RationalInterval,
    interval_sqrt,
)


class Vector:
    """A finitely supported element of l2, stored as ``index -> entry``.

    Zero entries are never stored, so two vectors are equal iff their maps are.
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping[int, object] | None = None):
        clean: dict[int, GaussianRational] = {}
        if entries:
            for idx, value in entries.items():
                if not isinstance(idx, int) or isinstance(idx, bool) or idx < 0:
                    raise DomainError(f"vector index must be a natural number, got {idx!r}")
                z = GaussianRational.of(value)
                if z:
                    clean[idx] = z
        self._entries = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _raw(cls, entries: dict[int, GaussianRational]) -> "Vector":
        v = object.__new__(cls)
        v._entries = dict(sorted((k, z) for k, z in entries.items() if z))
        v._hash = None
        return v

    @classmethod
    def basis(cls, n: int, coefficient=1) -> "Vector":
        """``coefficient * e_n``."""
        return cls({n: coefficient})

    @classmethod
    def dense(cls, values: Sequence[object]) -> "Vector":
        return cls({i: v for i, v in enumerate(values)})

    @property
    def entries(self) -> Mapping[int, GaussianRational]:
        return MappingProxyType(self._entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._entries)

    @property
    def max_index(self) -> int:
        """Largest index in the support, ``-1`` for the zero vector."""
        return next(reversed(self._entries), -1)

    def __getitem__(self, idx: int) -> GaussianRational:
        return self._entries.get(idx, ZERO)

    def items(self):
        return self._entries.items()

    def __len__(self):
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def __bool__(self):
        return bool(self._entries)

    def __add__(self, other: "Vector") -> "Vector":
        if not isinstance(other, Vector):
            return NotImplemented
        out = dict(self._entries)
        for k, z in other._entries.items():
            out[k] = out.get(k, ZERO) + z
        return Vector._raw(out)

    def __sub__(self, other: "Vector") -> "Vector":
        if not isinstance(other, Vector):
            return NotImplemented
        out = dict(self._entries)
        for k, z in other._entries.items():
            out[k] = out.get(k, ZERO) - z
        return Vector._raw(out)

    def __neg__(self) -> "Vector":
        return Vector._raw({k: -z for k, z in self._entries.items()})

    def scale(self, scalar) -> "Vector":
        s = GaussianRational.of(scalar)
        if not s:
            return Vector()
        return Vector._raw({k: s * z for k, z in self._entries.items()})

    def __mul__(self, scalar) -> "Vector":
        return self.scale(scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Vector":
        s = GaussianRational.of(scalar)
        if not s:
            raise DomainError("division of a vector by zero")
        return self.scale(GaussianRational(1) / s)

    def norm2(self) -> Fraction:
        return sum((z.abs2() for z in self._entries.values()), Fraction(0))

    def conjugate(self) -> "Vector":
        return Vector._raw({k: z.conjugate() for k, z in self._entries.items()})

    def real_coordinates(self) -> list[tuple[int, int, Fraction]]:
        """``(index, part, value)`` with part 0 for real and 1 for imaginary."""
        out = []
        for k, z in self._entries.items():
            out.append((k, 0, z.re))
            out.append((k, 1, z.im))
        return out

    def __eq__(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{k}: {str(z)!r}" for k, z in self._entries.items())
        return f"Vector({{{body}}})"


def basis(n: int) -> Vector:
    return Vector.basis(n)


def inner_product(x: Vector, y: Vector) -> GaussianRational:
    """``<x|y> = sum conj(x_n) y_n``, conjugate-linear in ``x``."""
    if len(x) > len(y):
        small, large, conj_small = y, x, False
    else:
        small, large, conj_small = x, y, True
    re = Fraction(0)
    im = Fraction(0)
    for k, a in small.items():
        b = large._entries.get(k)
        if b is None:
            continue
        if conj_small:
            # conj(a) * b
            re += a.re * b.re + a.im * b.im
            im += a.re * b.im - a.im * b.re
        else:
            # conj(b) * a, where b comes from x
            re += b.re * a.re + b.im * a.im
            im += b.re * a.im - b.im * a.re
    return GaussianRational(re, im)


def norm2(x: Vector) -> Fraction:
    return x.norm2()


class OrthogonalFamily:
    """Pairwise orthogonal nonzero vectors (not normalised)."""

    __slots__ = ("vectors", "norms2")

    def __init__(self, vectors: Iterable[Vector], *, check: bool = True):
        vecs = tuple(vectors)
        if check:
            for i, v in enumerate(vecs):
                if v.is_zero():
                    raise DomainError("orthogonal family contains the zero vector")
                for w in vecs[:i]:
                    if inner_product(w, v):
                        raise DomainError("family is not pairwise orthogonal")
        self.vectors = vecs
        self.norms2 = tuple(v.norm2() for v in vecs)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self) -> Iterator[Vector]:
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def __repr__(self):
        return f"OrthogonalFamily({list(self.vectors)!r})"


def gram_schmidt(generators: Iterable[Vector]) -> OrthogonalFamily:
    """Exact Gram-Schmidt; dependent generators are dropped."""
    basis_: list[Vector] = []
    norms: list[Fraction] = []
    for v in generators:
        w = v
        for b, nb in zip(basis_, norms):
            coeff = inner_product(b, w) / nb
            if coeff:
                w = w - b.scale(coeff)
        if not w.is_zero():
            basis_.append(w)
            norms.append(w.norm2())
    return OrthogonalFamily(basis_, check=False)


def project(c: Vector, family: OrthogonalFamily) -> Vector:
    """Orthogonal projection of ``c`` onto ``span(family)``."""
    out = Vector()
    for b, nb in zip(family.vectors, family.norms2):
        coeff = inner_product(b, c) / nb
        if coeff:
            out = out + b.scale(coeff)
    return out


def projection_norm2(c: Vector, family: OrthogonalFamily) -> Fraction:
    """``|P c|^2`` for the projection onto ``span(family)``."""
    total = Fraction(0)
    for b, nb in zip(family.vectors, family.norms2):
        total += inner_product(b, c).abs2() / nb
    return total


def distance_sq(c: Vector, family: OrthogonalFamily) -> Fraction:
    """Squared distance from ``c`` to ``span(family)``."""
    return c.norm2() - projection_norm2(c, family)


# ---------------------------------------------------------------------------
# rational points on the unit sphere


def _unit_close(u: Vector, x: Vector, eps: Fraction) -> bool:
    """Decide ``|u - x/|x|| < eps`` exactly for a unit vector ``u``.

    Both vectors are unit after normalisation, so the squared distance is
    ``2 - 2 Re<u, x>/|x|`` and the test becomes ``Re<u,x> > t |x|`` with
    ``t = 1 - eps^2/2``; squaring handles the root.
    """
    a = inner_product(u, x).re
    t = 1 - eps * eps / 2
    n2 = x.norm2()
    if t < 0:
        return a >= 0 or a * a < t * t * n2
    return a > 0 and a * a > t * t * n2


def rationalize_unit(x: Vector, eps) -> Vector:
    """A Gaussian-rational vector of exact unit norm within ``eps`` of ``x/|x|``.

    The normalised direction is approximated, pushed through stereographic
    projection from the pole opposite its largest real coordinate, and the
    plane point is rounded to small denominators before being mapped back.
    The inverse projection of a rational point is always an exact rational unit
    vector.  Denominators double until the distance test passes.
    """
    eps = Fraction(eps)
    if x.is_zero():
        raise DomainError("cannot normalise the zero vector")
    if eps <= 0:
        raise DomainError("eps must be positive")
    coords = x.real_coordinates()
    pole = max(range(len(coords)), key=lambda i: (abs(coords[i][2]), -i))
    sign = 1 if coords[pole][2] > 0 else -1
    n2 = x.norm2()
    k = 0
    while True:
        den = 2**k
        norm = interval_sqrt(RationalInterval.point(n2), Fraction(1, 4**k * 1024)).mid
        y = [v / norm for (_, _, v) in coords]
        denom = 1 + abs(y[pole])
        s = [
            Fraction(0) if i == pole else (yi / denom).limit_denominator(den)
            for i, yi in enumerate(y)
        ]
        s2 = sum(si * si for si in s)
        u_real = [2 * si / (1 + s2) for si in s]
        u_real[pole] = sign * (1 - s2) / (1 + s2)
        entries: dict[int, GaussianRational] = {}
        for i in range(0, len(coords), 2):
            entries[coords[i][0]] = GaussianRational(u_real[i], u_real[i + 1])
        u = Vector._raw(entries)
        if _unit_close(u, x, eps):
            return u
        k += 1


# ---------------------------------------------------------------------------
# exact elimination over the Gaussian rationals


def rref(rows: list[list[GaussianRational]]) -> tuple[list[list[GaussianRational]], list[int]]:
    """Reduced row echelon form; returns the matrix and its pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = GaussianRational(1) / m[r][col]
        m[r] = [inv * a for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def _coordinate_rows(columns: Sequence[Vector]) -> list[list[GaussianRational]]:
    indices = sorted({k for v in columns for k in v.support})
    return [[v[k] for v in columns] for k in indices]


def nullspace(columns: Sequence[Vector]) -> list[list[GaussianRational]]:
    """Basis of ``{a : sum_k a_k columns[k] = 0}``."""
    n = len(columns)
    if n == 0:
        return []
    rows = _coordinate_rows(columns)
    if not rows:
        rows = [[ZERO] * n]
    m, pivots = rref(rows)
    free = [j for j in range(n) if j not in pivots]
    out = []
    for f in free:
        sol = [ZERO] * n
        sol[f] = GaussianRational(1)
        for row, p in zip(m, pivots):
            sol[p] = -row[f]
        out.append(sol)
    return out


def rank(vectors: Sequence[Vector]) -> int:
    if not vectors:
        return 0
    rows = _coordinate_rows(vectors)
    if not rows:
        return 0
    return len(rref(rows)[1])


def combine(coefficients: Sequence[GaussianRational], vectors: Sequence[Vector]) -> Vector:
    out = Vector()
    for a, v in zip(coefficients, vectors):
        if a:
            out = out + v.scale(a)
    return out
