"""Bounded self-adjoint operators, their functional calculus and the spectral
valuation.

For a self-adjoint ``A`` with ``|A| <= 1`` and a unit vector ``x``, the integral
``I_A(x)(f) = <x, f(A) x>`` is enclosed in a rational interval, and the spectral
valuation is the upper real

    nu_A(x)(C) = inf { q : some piecewise-linear f > 1 on C has I_A(x)(f) < q }.

Two enclosures of ``I_A(x)(f)`` are provided:

* ``"bernstein"``: the Bernstein polynomial of ``f`` evaluated at ``A`` with the a
  priori error ``(3/2) Lip(f) / sqrt(n)`` and explicit truncation errors.  Works
  for any operator with a truncation modulus, but converges slowly.
* ``"krylov"``: when the Krylov space of ``x`` is finite dimensional, exact
  Lanczos gives the orthogonal polynomials of the spectral measure of ``x``;
  its atoms are the roots of the last one (isolated by Sturm sequences) and
  its weights are Christoffel numbers.  Enclosures are then as tight as asked.

``"auto"`` uses Krylov when the space closes within ``max_krylov_dim`` steps.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .arith import (
    ZERO,
    DomainError,
    GaussianRational,
    ParseError,
    RationalInterval,
    Semidecision,
    UpperReal,
    parse_rational,
    sqrt_lower,
    sqrt_upper,
)
from .hilbert import Vector, inner_product

Entry = Callable[[int, int], GaussianRational]


# ---------------------------------------------------------------------------
# operators


class BoundedOperator:
    """A bounded operator on l2 given by its matrix entries.

    Truncation needs a modulus: either a band width (``entry(i, j) = 0`` when
    ``|i - j| > band``), a finite size (entries vanish outside ``size x size``),
    or a ``column_tail(j, N)`` bounding ``sum_{i >= N} |entry(i, j)|^2``.
    """

    def __init__(
        self,
        entry: Entry,
        *,
        band: Optional[int] = None,
        size: Optional[int] = None,
        column_tail: Optional[Callable[[int, int], Fraction]] = None,
        norm_bound=1,
        self_adjoint: bool = True,
        kind: str = "custom",
        data: object = None,
    ):
        self._entry = entry
        self.band = band
        self.size = size
        self._column_tail = column_tail
        self.norm_bound = Fraction(norm_bound)
        self.self_adjoint = self_adjoint
        self.kind = kind
        self.data = data

    def entry(self, i: int, j: int) -> GaussianRational:
        if self.size is not None and (i >= self.size or j >= self.size):
            return ZERO
        if self.band is not None and abs(i - j) > self.band:
            return ZERO
        return GaussianRational.of(self._entry(i, j))

    @property
    def exact(self) -> bool:
        """Whether every column has finite, known support."""
        return self.band is not None or self.size is not None

    def column_rows(self, j: int) -> range:
        lo, hi = 0, None
        if self.band is not None:
            lo, hi = max(0, j - self.band), j + self.band + 1
        if self.size is not None:
            hi = self.size if hi is None else min(hi, self.size)
            if j >= self.size:
                return range(0)
        if hi is None:
            raise DomainError("operator columns have no finite support")
        return range(lo, hi)

    def column_tail(self, j: int, N: int) -> Fraction:
        """Bound on ``sum_{i >= N} |entry(i, j)|^2``."""
        if self.exact:
            return sum(
                (self.entry(i, j).abs2() for i in self.column_rows(j) if i >= N), Fraction(0)
            )
        if self._column_tail is None:
            raise DomainError("operator declares no truncation modulus")
        return Fraction(self._column_tail(j, N))

    def apply(self, x: Vector) -> Vector:
        """Exact ``A x`` for banded or finite operators."""
        if not self.exact:
            raise DomainError("exact application needs a band or a finite size")
        out: dict[int, GaussianRational] = {}
        for j, xj in x.items():
            for i in self.column_rows(j):
                a = self.entry(i, j)
                if a:
                    out[i] = out.get(i, ZERO) + a * xj
        return Vector._raw(out)

    def check_self_adjoint(self, n: int) -> bool:
        """``entry(i, j) == conj(entry(j, i))`` for all ``i, j < n``."""
        return all(
            self.entry(i, j) == self.entry(j, i).conjugate() for i in range(n) for j in range(i, n)
        )

    def __repr__(self):
        return f"BoundedOperator(kind={self.kind!r}, band={self.band}, size={self.size})"

    # constructors -------------------------------------------------------

    @classmethod
    def diagonal(cls, eigenvalues: Sequence[object]) -> "BoundedOperator":
        eigs = tuple(Fraction(e) if not isinstance(e, str) else parse_rational(e) for e in eigenvalues)
        for e in eigs:
            if abs(e) > 1:
                raise DomainError(f"eigenvalue {e} violates the norm bound 1")

        def entry(i, j):
            return GaussianRational(eigs[i]) if i == j else ZERO

        return cls(entry, band=0, size=len(eigs), kind="diagonal", data=eigs)

    @classmethod
    def identity(cls) -> "BoundedOperator":
        return cls(lambda i, j: GaussianRational(1) if i == j else ZERO, band=0, kind="identity")

    @classmethod
    def zero(cls) -> "BoundedOperator":
        return cls(lambda i, j: ZERO, band=0, kind="zero")

    @classmethod
    def finite(cls, entries: Mapping[tuple[int, int], object], size: Optional[int] = None) -> "BoundedOperator":
        """Hermitian matrix from its entries with ``i <= j``; the rest by symmetry."""
        m: dict[tuple[int, int], GaussianRational] = {}
        for (i, j), v in entries.items():
            z = GaussianRational.of(v)
            if i > j:
                i, j, z = j, i, z.conjugate()
            if (i, j) in m and m[(i, j)] != z:
                raise DomainError(f"inconsistent Hermitian entries at ({i}, {j})")
            if i == j and not z.is_real():
                raise DomainError(f"diagonal entry ({i}, {i}) is not real")
            m[(i, j)] = z
        n = size if size is not None else 1 + max((max(k) for k in m), default=-1)
        if not _norm_at_most_one(m, n):
            raise DomainError("matrix norm exceeds 1")

        def entry(i, j):
            if i <= j:
                return m.get((i, j), ZERO)
            return m.get((j, i), ZERO).conjugate()

        return cls(entry, size=n, kind="finite", data=dict(m))

    @classmethod
    def banded_toeplitz(cls, diagonals: Mapping[int, object]) -> "BoundedOperator":
        """Hermitian Toeplitz operator on l2(N): ``entry(i, i+d) = a_d`` for ``d >= 0``.

        The norm is checked by the Schur bound ``|a_0| + 2 sum_{d>0} |a_d| <= 1``.
        """
        diag = {int(d): GaussianRational.of(v) for d, v in diagonals.items()}
        if any(d < 0 for d in diag):
            raise DomainError("give only the diagonals d >= 0")
        if 0 in diag and not diag[0].is_real():
            raise DomainError("main diagonal must be real")
        total = sum(
            ((1 if d == 0 else 2) * sqrt_upper(z.abs2()) for d, z in diag.items()), Fraction(0)
        )
        if total > 1:
            raise DomainError("Schur bound exceeds 1; cannot certify the norm bound")
        band = max(diag, default=0)

        def entry(i, j):
            d = j - i
            if d >= 0:
                return diag.get(d, ZERO)
            return diag.get(-d, ZERO).conjugate()

        return cls(entry, band=band, kind="banded", data=diag)

    @classmethod
    def right_shift(cls, power: int = 1) -> "BoundedOperator":
        """``e_j -> e_{j+power}``; an isometry, not self-adjoint."""
        return cls(
            lambda i, j: GaussianRational(1) if i == j + power else ZERO,
            band=power,
            self_adjoint=power == 0,
            kind="right_shift",
            data=power,
        )

    @classmethod
    def left_shift(cls, power: int = 1) -> "BoundedOperator":
        """``e_j -> e_{j-power}`` (zero when ``j < power``)."""
        return cls(
            lambda i, j: GaussianRational(1) if j == i + power else ZERO,
            band=power,
            self_adjoint=power == 0,
            kind="left_shift",
            data=power,
        )

    @classmethod
    def coordinate_projection(cls, n: int) -> "BoundedOperator":
        """Projection onto ``span(e_0, ..., e_{n-1})``."""
        return cls(
            lambda i, j: GaussianRational(1) if i == j < n else ZERO,
            band=0,
            kind="projection",
            data=n,
        )


def _norm_at_most_one(m: Mapping[tuple[int, int], GaussianRational], n: int) -> bool:
    """Decide ``|A| <= 1`` for a Hermitian matrix given by its upper triangle."""

    def a(i, j):
        return m.get((i, j), ZERO) if i <= j else m.get((j, i), ZERO).conjugate()

    # Schur row-sum bound first; it is sufficient for Hermitian matrices.
    rows_ok = all(
        sum((sqrt_upper(a(i, j).abs2()) for j in range(n)), Fraction(0)) <= 1 for i in range(n)
    )
    if rows_ok:
        return True
    # exact: I - A^2 must be positive semidefinite
    A = [[a(i, j) for j in range(n)] for i in range(n)]
    M = [
        [
            (GaussianRational(1) if i == j else ZERO) - sum((A[i][k] * A[k][j] for k in range(n)), ZERO)
            for j in range(n)
        ]
        for i in range(n)
    ]
    return _hermitian_psd(M)


def _hermitian_psd(M: list[list[GaussianRational]]) -> bool:
    M = [row[:] for row in M]
    n = len(M)
    for k in range(n):
        p = M[k][k].re
        if p < 0:
            return False
        if p == 0:
            if any(M[k][j] for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                for j in range(k, n):
                    M[i][j] = M[i][j] - f * M[k][j]
    return True


def rescale(A: BoundedOperator, c) -> BoundedOperator:
    """``A / c`` for an operator with ``|A| <= c``; declared norm bound becomes 1."""
    c = Fraction(c)
    if c <= 0:
        raise DomainError("scale must be positive")
    tail = None
    if A._column_tail is not None:
        tail = lambda j, N: Fraction(A._column_tail(j, N)) / (c * c)
    return BoundedOperator(
        lambda i, j: A.entry(i, j) / c,
        band=A.band,
        size=A.size,
        column_tail=tail,
        norm_bound=A.norm_bound / c,
        self_adjoint=A.self_adjoint,
        kind=f"rescaled({A.kind})",
    )


def operator_power(A: BoundedOperator, k: int) -> BoundedOperator:
    """``A^k`` for an exact operator, entries computed column by column."""
    if not A.exact:
        raise DomainError("powers need a band or a finite size")
    if k == 0:
        return BoundedOperator.identity()

    def entry(i, j):
        y = Vector.basis(j)
        for _ in range(k):
            y = A.apply(y)
        return y[i]

    band = None if A.band is None else A.band * k
    return BoundedOperator(entry, band=band, size=A.size, self_adjoint=A.self_adjoint, kind=f"{A.kind}^{k}")


def apply_truncated(A: BoundedOperator, x: Vector, N: int) -> tuple[Vector, Fraction]:
    """``P_N A P_N x`` exactly, with a rational bound on its distance to ``A x``.

    The bound adds ``|A| |x_{>=N}|`` for the discarded part of ``x`` and
    ``sum_j |x_j| sqrt(column_tail(j, N))`` for the rows cut off.
    """
    out: dict[int, GaussianRational] = {}
    dropped2 = Fraction(0)
    err = Fraction(0)
    for j, xj in x.items():
        if j >= N:
            dropped2 += xj.abs2()
            continue
        rows = A.column_rows(j) if A.exact else range(N)
        for i in rows:
            if i >= N:
                continue
            a = A.entry(i, j)
            if a:
                out[i] = out.get(i, ZERO) + a * xj
        tail = A.column_tail(j, N)
        if tail:
            err += sqrt_upper(xj.abs2() * tail)
    if dropped2:
        err += A.norm_bound * sqrt_upper(dropped2)
    return Vector._raw(out), err


# ---------------------------------------------------------------------------
# piecewise linear functions and closed sets


class PLFunction:
    """Continuous piecewise-linear function with rational breakpoints in [-1, 1],
    affine between breakpoints and constant outside them."""

    __slots__ = ("breakpoints",)

    def __init__(self, breakpoints: Iterable[tuple[object, object]]):
        pts = [(Fraction(t), Fraction(v)) for t, v in breakpoints]
        if not pts:
            raise DomainError("a piecewise-linear function needs at least one breakpoint")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if not t0 < t1:
                raise DomainError("breakpoints must be strictly increasing")
        if pts[0][0] < -1 or pts[-1][0] > 1:
            raise DomainError("breakpoints must lie in [-1, 1]")
        self.breakpoints = tuple(pts)

    @classmethod
    def constant(cls, v) -> "PLFunction":
        return cls([(0, v)])

    @classmethod
    def identity(cls) -> "PLFunction":
        return cls([(-1, -1), (1, 1)])

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        pts = self.breakpoints
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        raise AssertionError("unreachable")

    def slopes(self) -> list[Fraction]:
        return [(v1 - v0) / (t1 - t0) for (t0, v0), (t1, v1) in zip(self.breakpoints, self.breakpoints[1:])]

    def lipschitz(self) -> Fraction:
        """Exact largest absolute slope (0 for constants)."""
        return max((abs(s) for s in self.slopes()), default=Fraction(0))

    def is_affine_on_unit(self) -> bool:
        """Affine on all of [-1, 1]."""
        pts = self.breakpoints
        inner = [p for p in pts if -1 < p[0] < 1]
        if not inner:
            return True
        sl = set(self._extended_slopes())
        return len(sl) == 1

    def _extended_slopes(self) -> list[Fraction]:
        pts = list(self.breakpoints)
        if pts[0][0] > -1:
            pts.insert(0, (Fraction(-1), pts[0][1]))
        if pts[-1][0] < 1:
            pts.append((Fraction(1), pts[-1][1]))
        return [(v1 - v0) / (t1 - t0) for (t0, v0), (t1, v1) in zip(pts, pts[1:])]

    def range_on(self, lo, hi) -> RationalInterval:
        """Exact ``[min f, max f]`` over ``[lo, hi]``."""
        lo, hi = Fraction(lo), Fraction(hi)
        vals = [self(lo), self(hi)]
        vals += [v for t, v in self.breakpoints if lo < t < hi]
        return RationalInterval(min(vals), max(vals))

    def combine(self, alpha, other: "PLFunction", beta) -> "PLFunction":
        """``alpha * self + beta * other``."""
        alpha, beta = Fraction(alpha), Fraction(beta)
        ts = sorted({t for t, _ in self.breakpoints} | {t for t, _ in other.breakpoints})
        return PLFunction([(t, alpha * self(t) + beta * other(t)) for t in ts])

    def __eq__(self, other):
        return isinstance(other, PLFunction) and self.breakpoints == other.breakpoints

    def __hash__(self):
        return hash(self.breakpoints)

    def __repr__(self):
        body = ", ".join(f"({t}, {v})" for t, v in self.breakpoints)
        return f"PLFunction([{body}])"


class ClosedRationalSet:
    """A finite union of closed rational intervals, intersected with [-1, 1].

    Stored as sorted, disjoint, non-touching components.  Degenerate intervals
    ``[p, p]`` are points.
    """

    __slots__ = ("components",)

    def __init__(self, intervals: Iterable[tuple[object, object]] = ()):
        items = []
        for a, b in intervals:
            a, b = max(Fraction(a), Fraction(-1)), min(Fraction(b), Fraction(1))
            if a > b:
                continue
            items.append((a, b))
        items.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in items:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.components = tuple(merged)

    @classmethod
    def empty(cls) -> "ClosedRationalSet":
        return cls(())

    @classmethod
    def full(cls) -> "ClosedRationalSet":
        return cls([(-1, 1)])

    @classmethod
    def points(cls, *ts) -> "ClosedRationalSet":
        return cls([(t, t) for t in ts])

    def is_empty(self) -> bool:
        return not self.components

    def contains(self, t) -> bool:
        t = Fraction(t)
        return any(a <= t <= b for a, b in self.components)

    __contains__ = contains

    def union(self, other: "ClosedRationalSet") -> "ClosedRationalSet":
        return ClosedRationalSet(self.components + other.components)

    def intersection(self, other: "ClosedRationalSet") -> "ClosedRationalSet":
        out = []
        for a, b in self.components:
            for c, d in other.components:
                lo, hi = max(a, c), min(b, d)
                if lo <= hi:
                    out.append((lo, hi))
        return ClosedRationalSet(out)

    def subset_of(self, other: "ClosedRationalSet") -> bool:
        return all(any(c <= a and b <= d for c, d in other.components) for a, b in self.components)

    def boundary(self) -> list[Fraction]:
        """Boundary points relative to [-1, 1]."""
        pts = []
        for a, b in self.components:
            if a > -1:
                pts.append(a)
            if b < 1 and b != a:
                pts.append(b)
            elif b < 1 and a == -1:
                pts.append(b)
        return sorted(set(pts))

    def boundary_gap(self, ts: Iterable[object]) -> Optional[Fraction]:
        """Least distance from the points ``ts`` to the boundary (``None`` if no boundary)."""
        bd = self.boundary()
        if not bd:
            return None
        return min(abs(Fraction(t) - p) for t in ts for p in bd)

    def __eq__(self, other):
        return isinstance(other, ClosedRationalSet) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __str__(self):
        if not self.components:
            return "∅"
        parts = []
        for a, b in self.components:
            parts.append(f"{{{_fmt(a)}}}" if a == b else f"[{_fmt(a)},{_fmt(b)}]")
        return "∪".join(parts)

    def __repr__(self):
        return f"ClosedRationalSet({str(self)!r})"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_SET_PART = re.compile(r"^\s*(\[[^\]]*\]|\{[^}]*\})\s*$")


def parse_closed_set(text: str) -> ClosedRationalSet:
    """Parse ``"[a,b]∪[c,d]"``, ``"{p}"``, ``"{p,q}"`` or ``"∅"``.

    ``U``, ``u`` and ``|`` are accepted in place of ``∪``.
    """
    t = text.strip()
    if t in ("∅", "{}", "", "empty"):
        return ClosedRationalSet.empty()
    parts = re.split(r"∪|\bU\b|\bu\b|\|", t)
    out = []
    for part in parts:
        m = _SET_PART.match(part)
        if not m:
            raise ParseError(f"not a closed set component: {part!r}")
        body = m.group(1)
        items = [s for s in body[1:-1].split(",") if s.strip()]
        if body.startswith("["):
            if len(items) != 2:
                raise ParseError(f"interval needs two endpoints: {part!r}")
            a, b = (parse_rational(s) for s in items)
            if a > b:
                raise ParseError(f"empty interval {part!r}")
            out.append((a, b))
        else:
            out.extend((q, q) for q in (parse_rational(s) for s in items))
    return ClosedRationalSet(out)


def exceeds_on(f: PLFunction, C: ClosedRationalSet, level=1) -> bool:
    """``f(t) > level`` for every ``t`` in ``C``, checked at endpoints and breakpoints."""
    level = Fraction(level)
    return all(f.range_on(a, b).lo > level for a, b in C.components)


def witness(C: ClosedRationalSet, k: int) -> PLFunction:
    """The ``k``-th test function for ``C``.

    Plateau ``1 + 2^-k`` on each component, linear ramps of width ``2^-k`` down
    to 0; components closer than two ramp widths share one plateau.  The
    result is continuous, nonnegative and exceeds 1 on ``C``.
    """
    if not C.components:
        return PLFunction.constant(0)
    w = Fraction(1, 2**k)
    v = 1 + w
    groups: list[list[Fraction]] = []
    for a, b in C.components:
        if groups and a - w <= groups[-1][1] + w:
            groups[-1][1] = b
        else:
            groups.append([a, b])
    pts: list[tuple[Fraction, Fraction]] = []
    for a, b in groups:
        pts += [(a - w, Fraction(0)), (a, v), (b, v), (b + w, Fraction(0))]
    # drop the repeated point of degenerate plateaus, then clip to [-1, 1]
    dedup: list[tuple[Fraction, Fraction]] = []
    for t, val in pts:
        if dedup and dedup[-1][0] == t:
            continue
        dedup.append((t, val))
    inner = [(t, val) for t, val in dedup if -1 < t < 1]
    clipped = [(Fraction(-1), _eval_unclipped(dedup, Fraction(-1)))] + inner
    clipped.append((Fraction(1), _eval_unclipped(dedup, Fraction(1))))
    return PLFunction(clipped)


def _eval_unclipped(pts, t):
    if t <= pts[0][0]:
        return pts[0][1]
    if t >= pts[-1][0]:
        return pts[-1][1]
    for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
        if t0 <= t <= t1:
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# polynomials (rational coefficients, lowest degree first)


def poly_eval(p: Sequence[Fraction], t) -> Fraction:
    acc = Fraction(0)
    for a in reversed(p):
        acc = acc * t + a
    return acc


def poly_eval_interval(p: Sequence[Fraction], t: RationalInterval) -> RationalInterval:
    acc = RationalInterval.point(0)
    for a in reversed(p):
        acc = acc * t + a
    return acc


def poly_derivative(p: Sequence[Fraction]) -> list[Fraction]:
    return [k * a for k, a in enumerate(p)][1:]


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_rem(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise DomainError("polynomial division by zero")
    while len(a) >= len(b):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, bk in enumerate(b):
            a[shift + k] -= f * bk
        a.pop()
        _trim(a)
    return a


def sturm_chain(p: Sequence[Fraction]) -> list[list[Fraction]]:
    chain = [_trim(list(p)), poly_derivative(p)]
    while True:
        r = poly_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-a for a in r])
    return chain


def _sign_changes(chain, t) -> int:
    signs = [s for s in (poly_eval(q, t) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def isolate_roots(p: Sequence[Fraction], width) -> list[RationalInterval]:
    """Enclosures of width ``<= width`` for the distinct real roots of ``p``."""
    width = Fraction(width)
    p = _trim(list(p))
    if len(p) <= 1:
        return []
    chain = sturm_chain(p)
    bound = 1 + max(abs(a / p[-1]) for a in p[:-1])  # Cauchy: roots in (-bound, bound)
    out: list[RationalInterval] = []

    def count(a, b):  # roots in (a, b]
        return _sign_changes(chain, a) - _sign_changes(chain, b)

    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1 and b - a <= width:
            out.append(RationalInterval(a, b))
            continue
        m = (a + b) / 2
        if poly_eval(p, m) == 0 and n == 1:
            out.append(RationalInterval.point(m))
            continue
        stack.append((m, b))
        stack.append((a, m))
    out.sort(key=lambda iv: iv.lo)
    return out


def refine_root(p, chain, iv: RationalInterval, width) -> RationalInterval:
    """Bisect an isolating interval ``(lo, hi]`` down to ``width``."""
    a, b = iv.lo, iv.hi
    if a == b:
        return iv
    while b - a > width:
        m = (a + b) / 2
        if poly_eval(p, m) == 0:
            return RationalInterval.point(m)
        if _sign_changes(chain, a) - _sign_changes(chain, m) == 1:
            b = m
        else:
            a = m
    return RationalInterval(a, b)


# ---------------------------------------------------------------------------
# Bernstein approximation


@dataclass(frozen=True)
class BernsteinApprox:
    """``B_n f`` written in powers of ``u = (1 + t)/2``: ``sum_j coeffs[j] u^j``."""

    degree: int
    coeffs: tuple[Fraction, ...]
    error_bound: Fraction

    def __call__(self, t) -> Fraction:
        return poly_eval(self.coeffs, (1 + Fraction(t)) / 2)

    def monomial(self) -> list[Fraction]:
        """Coefficients in powers of ``t`` (quadratic cost; for small degrees)."""
        out = [Fraction(0)] * (self.degree + 1)
        # (1 + t)^j / 2^j expanded binomially
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            scale = c / 2**j
            for k in range(j + 1):
                out[k] += scale * math.comb(j, k)
        return out


def bernstein_error_bound(f: PLFunction, n: int) -> Fraction:
    """``(3/2) Lip(f) / sqrt(n)`` rounded up; 0 when ``f`` is affine on [-1, 1]."""
    if f.is_affine_on_unit():
        return Fraction(0)
    return Fraction(3, 2) * f.lipschitz() / sqrt_lower(n)


def bernstein_approx(f: PLFunction, n: int) -> BernsteinApprox:
    """Bernstein polynomial of ``f`` on [-1, 1] at nodes ``-1 + 2k/n``.

    In the variable ``u`` the coefficients are ``C(n, j) Delta^j f_0`` with
    forward differences of the node values.
    """
    if n < 1:
        raise DomainError("degree must be >= 1")
    vals = [f(Fraction(-1) + Fraction(2 * k, n)) for k in range(n + 1)]
    coeffs = []
    diffs = vals
    for j in range(n + 1):
        coeffs.append(math.comb(n, j) * diffs[0])
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    return BernsteinApprox(n, tuple(coeffs), bernstein_error_bound(f, n))


def bernstein_degree(f: PLFunction, tolerance) -> int:
    """Smallest power of two with ``bernstein_error_bound <= tolerance``."""
    tolerance = Fraction(tolerance)
    if f.is_affine_on_unit():
        return 1
    n = 1
    while bernstein_error_bound(f, n) > tolerance:
        n *= 2
    return n


# ---------------------------------------------------------------------------
# Krylov quadrature


class KrylovQuadrature:
    """The spectral measure of ``x`` for ``A`` when its Krylov space is finite.

    Lanczos without normalisation gives monic ``p_0, ..., p_m`` with
    ``p_{k+1} = (t - alpha_k) p_k - beta_k p_{k-1}`` and ``h_k = |p_k(A) x|^2``.
    When ``p_m(A) x = 0`` the measure is ``sum_j w_j delta_{theta_j}`` over the
    roots of ``p_m`` with ``w_j = h_{m-1} / (p_{m-1}(theta_j) p_m'(theta_j))``.
    """

    def __init__(self, A: BoundedOperator, x: Vector, max_dim: int = 64):
        if not A.self_adjoint:
            raise DomainError("the spectral measure needs a self-adjoint operator")
        if not A.exact:
            raise DomainError("Krylov quadrature needs exact application")
        polys: list[list[Fraction]] = [[Fraction(1)]]
        h: list[Fraction] = []
        v_prev, v = Vector(), x
        prev_poly: list[Fraction] = []
        for k in range(max_dim + 1):
            hk = v.norm2()
            if hk == 0:
                break
            h.append(hk)
            if k == max_dim:
                raise DomainError(f"Krylov space exceeds {max_dim} dimensions")
            Av = A.apply(v)
            alpha_z = inner_product(v, Av) / hk
            if not alpha_z.is_real():
                raise DomainError("operator is not self-adjoint on the Krylov space")
            alpha = alpha_z.re
            beta = hk / h[k - 1] if k else Fraction(0)
            w = Av - v.scale(alpha)
            if k:
                w = w - v_prev.scale(beta)
            p = polys[-1]
            nxt = [Fraction(0)] + list(p)  # t * p
            for i, a in enumerate(p):
                nxt[i] -= alpha * a
            for i, a in enumerate(prev_poly):
                nxt[i] -= beta * a
            prev_poly = p
            polys.append(nxt)
            v_prev, v = v, w
        self.dim = len(h)
        self.norms2 = tuple(h)
        self.polys = polys[: self.dim + 1]
        self.char = self.polys[-1]
        self._chain = sturm_chain(self.char) if self.dim else []
        self._dchar = poly_derivative(self.char)
        self._roots = isolate_roots(self.char, Fraction(1, 2**8)) if self.dim else []
        if len(self._roots) != self.dim:
            raise AssertionError("Lanczos polynomial has repeated or complex roots")

    def atoms(self, width) -> list[tuple[RationalInterval, RationalInterval]]:
        """``(theta_j enclosure, w_j enclosure)`` with theta widths ``<= width``."""
        if not self.dim:
            return []
        self._roots = [refine_root(self.char, self._chain, iv, width) for iv in self._roots]
        out = []
        hm = self.norms2[-1]
        q = self.polys[-2]
        for iv in self._roots:
            if iv.lo == iv.hi:
                den = poly_eval(q, iv.lo) * poly_eval(self._dchar, iv.lo)
                out.append((iv, RationalInterval.point(hm / den)))
                continue
            den = poly_eval_interval(q, iv) * poly_eval_interval(self._dchar, iv)
            if den.lo <= 0 <= den.hi:
                return self.atoms(width / 2**8)
            out.append((iv, RationalInterval.point(hm) / den))
        return out

    def enclose(self, f: PLFunction, precision) -> RationalInterval:
        """Interval of width ``<= precision`` containing ``sum_j w_j f(theta_j)``."""
        precision = Fraction(precision)
        width = Fraction(1, 2**16)
        while True:
            total = RationalInterval.point(0)
            for theta, w in self.atoms(width):
                total = total + f.range_on(theta.lo, theta.hi) * w
            if total.width <= precision:
                return total
            width /= 2**8


# ---------------------------------------------------------------------------
# integrals and the spectral valuation


def _check_unit(x: Vector) -> None:
    if x.norm2() != 1:
        raise DomainError(f"x must be exactly unit, has norm^2 {x.norm2()}")


MAX_BERNSTEIN_DEGREE = 4096


def _bernstein_integral(A: BoundedOperator, x: Vector, f: PLFunction, precision: Fraction) -> RationalInterval:
    n = bernstein_degree(f, precision / 4)
    if n > MAX_BERNSTEIN_DEGREE:
        raise DomainError(
            f"precision {precision} needs Bernstein degree {n} > {MAX_BERNSTEIN_DEGREE}; "
            "the Krylov space of x does not close"
        )
    approx = bernstein_approx(f, n)
    budget = precision / 4
    N = x.max_index + 1
    while True:
        y, err = _horner_in_u(A, x, approx.coeffs, N)
        if err <= budget:
            break
        if A.exact:
            raise AssertionError("exact operator produced a truncation error")
        N *= 2
    val = inner_product(x, y).re
    radius = approx.error_bound + err
    return RationalInterval(val - radius, val + radius)


def _horner_in_u(A: BoundedOperator, x: Vector, coeffs: Sequence[Fraction], N: int) -> tuple[Vector, Fraction]:
    """``p(U) x`` for ``U = (I + A)/2`` with accumulated truncation error."""
    y = Vector()
    err = Fraction(0)
    for k, c in enumerate(reversed(coeffs)):
        if k:
            if A.exact:
                Ay = A.apply(y)
                e = Fraction(0)
            else:
                Ay, e = apply_truncated(A, y, N)
            y = (y + Ay).scale(Fraction(1, 2))
            err += e / 2
        if c:
            y = y + x.scale(c)
    return y, err


def integral(
    A: BoundedOperator,
    x: Vector,
    f: PLFunction,
    precision,
    *,
    method: str = "auto",
    max_krylov_dim: int = 64,
) -> RationalInterval:
    """Enclosure of ``<x, f(A) x>`` of width at most ``precision``."""
    _check_unit(x)
    precision = Fraction(precision)
    if precision <= 0:
        raise DomainError("precision must be positive")
    if not A.self_adjoint:
        raise DomainError("functional calculus needs a self-adjoint operator")
    if method not in ("auto", "krylov", "bernstein"):
        raise DomainError(f"unknown integration method {method!r}")
    if method in ("auto", "krylov") and A.exact:
        try:
            return KrylovQuadrature(A, x, max_krylov_dim).enclose(f, precision)
        except DomainError:
            if method == "krylov":
                raise
    elif method == "krylov":
        raise DomainError("Krylov quadrature needs a band or a finite size")
    return _bernstein_integral(A, x, f, precision)


class _Integrator:
    """Memoised ``integral(A, x, ., .)`` for one operator and vector."""

    def __init__(self, A: BoundedOperator, x: Vector, method: str = "auto"):
        _check_unit(x)
        self.A, self.x, self.method = A, x, method
        self._quad = None
        if method in ("auto", "krylov") and A.exact:
            try:
                self._quad = KrylovQuadrature(A, x)
            except DomainError:
                if method == "krylov":
                    raise

    def __call__(self, f: PLFunction, precision: Fraction) -> RationalInterval:
        if self._quad is not None:
            return self._quad.enclose(f, precision)
        return _bernstein_integral(self.A, self.x, f, precision)


def _witness_bound(integrate: _Integrator, C: ClosedRationalSet, k: int) -> tuple[PLFunction, RationalInterval]:
    f = witness(C, k)
    if not exceeds_on(f, C):
        raise AssertionError("test function does not exceed 1 on the set")
    return f, integrate(f, Fraction(1, 2 ** (k + 3)))


def valuation_semidecide(A: BoundedOperator, x: Vector, C: ClosedRationalSet, q, *, method: str = "auto") -> Semidecision:
    """Semidecide ``nu_A(x)(C) < q``.

    Fuel ``k`` tries the test functions ``witness(C, 1..k)`` and confirms when
    an enclosure of some ``I_A(x)(f)`` at precision ``2^-(j+3)`` lies below ``q``.
    """
    q = Fraction(q)
    integrate = _Integrator(A, x, method)
    return Semidecision.from_steps(
        lambda: (_witness_bound(integrate, C, k)[1].hi < q for k in itertools.count(1))
    )


def valuation_upper(A: BoundedOperator, x: Vector, C: ClosedRationalSet, fuel: int, *, method: str = "auto") -> UpperReal:
    """Upper real for ``nu_A(x)(C)``.

    Bound 0 is the trivial 1; for empty ``C`` every later bound is 0.
    Bound ``k`` (``k <= fuel``) is the least grid point ``j / 2^(k+3)``
    strictly above the enclosure of ``I_A(x)(witness(C, k))``, where the
    semidecision at that ``q`` confirms; after ``fuel`` the stream repeats.  See :func:`fuel_for_accuracy` for the schedule.
    """
    if fuel < 1:
        raise DomainError("fuel must be >= 1")
    integrate = _Integrator(A, x, method)

    def source():
        best = Fraction(1)
        yield best
        for k in range(1, fuel + 1):
            if C.is_empty():
                # the zero function is a witness and integrates to exactly 0
                best = Fraction(0)
                yield best
                continue
            _, iv = _witness_bound(integrate, C, k)
            scale = 2 ** (k + 3)
            q = Fraction(math.floor(iv.hi * scale) + 1, scale)
            best = min(best, q)
            yield best
        while True:
            yield best

    return UpperReal(source)


def fuel_for_accuracy(gap, accuracy) -> int:
    """Fuel after which :func:`valuation_upper` is within ``accuracy`` of the value.

    ``gap`` is a lower bound on the distance between the spectrum of ``x`` and
    the boundary of ``C`` (and on half the distance between components of
    ``C``).  Once ``2^-k < gap`` no spectral mass lies under a ramp, so bound
    ``k`` is at most ``(1 + 2^-k) nu + 2^-(k+2)``.
    """
    gap, accuracy = Fraction(gap), Fraction(accuracy)
    if gap <= 0 or accuracy <= 0:
        raise DomainError("gap and accuracy must be positive")
    k = 1
    while not (Fraction(1, 2**k) < gap and Fraction(1, 2**k) + Fraction(1, 2 ** (k + 2)) <= accuracy):
        k += 1
    return k


class SpectralValuation:
    """``nu_A`` as a map ``(x, C) -> UpperReal``."""

    def __init__(self, operator: BoundedOperator, *, method: str = "auto"):
        if not operator.self_adjoint:
            raise DomainError("spectral valuations need a self-adjoint operator")
        self.operator = operator
        self.method = method

    def __call__(self, x: Vector, C: ClosedRationalSet, fuel: int = 16) -> UpperReal:
        return valuation_upper(self.operator, x, C, fuel, method=self.method)

    def semidecide(self, x: Vector, C: ClosedRationalSet, q) -> Semidecision:
        return valuation_semidecide(self.operator, x, C, q, method=self.method)


def diagonal_oracle(eigs: Sequence[object], x: Vector, C: ClosedRationalSet) -> Fraction:
    """``sum_{i : eigs[i] in C} |x_i|^2`` for the diagonal operator ``diag(eigs)``."""
    eigs = [Fraction(e) for e in eigs]
    if x.max_index >= len(eigs):
        raise DomainError("vector support exceeds the eigenvalue list")
    return sum((z.abs2() for i, z in x.items() if C.contains(eigs[i])), Fraction(0))
