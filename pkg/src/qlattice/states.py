"""Quantum states as functionals on closed subspaces.

A pure state ``s_x`` sends ``L`` to ``<x, P_L x> = 1 - d(x, L)^2``.  Mixed states
are countable convex combinations ``sum lam_n s_{b_n}`` over an orthonormal
family, carried with an explicit bound on the mass of the unseen tail.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

from .arith import DomainError, RationalInterval, UpperReal, interval_sqrt
from .hilbert import Vector, distance_sq, inner_product, projection_norm2
from .lattice import Subspace, SubspaceCode


class PureState:
    __slots__ = ("x",)

    def __init__(self, x: Vector):
        if x.norm2() != 1:
            raise DomainError(f"pure state vector must be exactly unit, has norm^2 {x.norm2()}")
        self.x = x

    def __repr__(self):
        return f"PureState({self.x!r})"


Term = tuple[Fraction, Vector]


class State:
    """``sum_n lam_n s_{b_n}`` with ``tail(n) >= sum_{k >= n} lam_k``.

    ``terms`` is either a finite sequence of ``(lam, b)`` or a callable
    ``n -> (lam, b)``; ``b_n`` must be exactly unit and pairwise orthogonal,
    which is checked on every prefix that gets inspected.
    """

    def __init__(
        self,
        terms: Union[Sequence[Term], Callable[[int], Term]],
        tail: Callable[[int], Fraction],
        *,
        length: Optional[int] = None,
    ):
        if callable(terms):
            self._term_fn = terms
            self._length = length
        else:
            seq = [(Fraction(lam), b) for lam, b in terms]
            self._term_fn = seq.__getitem__
            self._length = len(seq)
        self._tail = tail
        self._checked: list[Term] = []

    @classmethod
    def finite(cls, terms: Sequence[tuple[object, Vector]]) -> "State":
        """A finite mixture; the weights must sum to exactly 1."""
        seq = [(Fraction(lam), b) for lam, b in terms]
        if sum(lam for lam, _ in seq) != 1:
            raise DomainError("weights of a finite mixture must sum to 1")
        prefix = [Fraction(0)]
        for lam, _ in seq:
            prefix.append(prefix[-1] + lam)
        return cls(seq, lambda n: 1 - prefix[min(n, len(seq))])

    @classmethod
    def geometric(cls, term: Callable[[int], Term], ratio) -> "State":
        """Infinite mixture whose weights satisfy ``lam_{n+1} <= ratio * lam_n``.

        The tail after ``n`` terms is then at most ``lam_{n-1} ratio / (1 - ratio)``.
        """
        ratio = Fraction(ratio)
        if not (0 <= ratio < 1):
            raise DomainError("ratio must lie in [0, 1)")

        def tail(n: int) -> Fraction:
            if n == 0:
                return Fraction(1)
            return Fraction(term(n - 1)[0]) * ratio / (1 - ratio)

        return cls(term, tail)

    @property
    def length(self) -> Optional[int]:
        """Number of terms for finite mixtures, ``None`` for infinite ones."""
        return self._length

    def term(self, n: int) -> Term:
        while len(self._checked) <= n:
            k = len(self._checked)
            lam, b = self._term_fn(k)
            lam = Fraction(lam)
            if lam < 0:
                raise DomainError(f"negative weight {lam} at term {k}")
            if b.norm2() != 1:
                raise DomainError(f"term {k} is not a unit vector")
            for _, other in self._checked:
                if inner_product(other, b):
                    raise DomainError(f"term {k} is not orthogonal to an earlier term")
            self._checked.append((lam, b))
        return self._checked[n]

    def tail(self, n: int) -> Fraction:
        return Fraction(self._tail(n))

    def prefix(self, n: int) -> list[Term]:
        if self._length is not None:
            n = min(n, self._length)
        return [self.term(k) for k in range(n)]


AnyState = Union[PureState, State]


def pure_eval(s: PureState, L: Subspace) -> Fraction:
    """``s_x(L) = 1 - d(x, L)^2`` for a finite presentation."""
    return 1 - distance_sq(s.x, L.family())


def pure_eval_code(s: PureState, code: SubspaceCode) -> UpperReal:
    """Upper bounds on ``s_x(L)`` read off a certificate code of ``L``.

    A certificate ``(c, r)`` gives ``d(c, L) > r`` and, ``d`` being 1-Lipschitz,
    ``d(x, L) >= r - |x - c|``; the bound is ``1 - max(0, r - |x - c|)^2`` with
    ``|x - c|`` rounded up.  The stream has one bound per code slot, starting
    from the trivial bound 1.
    """
    x = s.x

    def source() -> Iterator[Fraction]:
        best = Fraction(0)  # certified lower bound on d(x, L)
        yield Fraction(1)
        for cert in code.stream():
            if cert is not None and cert.r > best:
                gap2 = (x - cert.c).norm2()
                if gap2 == 0:
                    lower = cert.r
                else:
                    lower = cert.r - interval_sqrt(RationalInterval.point(gap2)).hi
                if lower > best:
                    best = lower
            yield 1 - best * best

    return UpperReal(source)


def mixed_eval(S: State, L: Subspace, n: int) -> RationalInterval:
    """Enclosure of ``S(L)`` from the first ``n`` terms and the tail bound."""
    if n < 1:
        raise DomainError("prefix length must be >= 1")
    terms = S.prefix(n)
    lower = sum((lam * (1 - distance_sq(b, L.family())) for lam, b in terms), Fraction(0))
    return RationalInterval(lower, lower + S.tail(len(terms)))


def mixed_eval_code(S: State, code: SubspaceCode, n: int) -> UpperReal:
    """Upper real for ``S(L)`` on a coded subspace: per-term code bounds plus tail."""
    terms = S.prefix(n)
    tail = S.tail(len(terms))
    streams = [(lam, pure_eval_code(PureState(b), code)) for lam, b in terms]

    def source():
        iters = [(lam, u.bounds()) for lam, u in streams]
        while True:
            yield sum((lam * next(it) for lam, it in iters), Fraction(0)) + tail

    return UpperReal(source)


def orthogonal(P: Subspace, Q: Subspace) -> bool:
    return all(not inner_product(p, q) for p in P.generators for q in Q.generators)


def orthogonal_join(P: Subspace, Q: Subspace) -> Subspace:
    """``P v Q`` for orthogonal finite presentations: the union of generators."""
    if not orthogonal(P, Q):
        raise DomainError("join is only available for orthogonal subspaces")
    return Subspace(P.generators + Q.generators)


@dataclass(frozen=True)
class AdditivityReport:
    s_P: Union[Fraction, RationalInterval]
    s_Q: Union[Fraction, RationalInterval]
    s_join: Union[Fraction, RationalInterval]
    holds: bool

    def describe(self) -> str:
        mark = "holds" if self.holds else "VIOLATED"
        return f"s(P)={self.s_P} s(Q)={self.s_Q} s(P v Q)={self.s_join}: {mark}"


def _exact_value(S: AnyState, L: Subspace) -> Optional[Fraction]:
    if isinstance(S, PureState):
        return pure_eval(S, L)
    if S.length is not None and S.tail(S.length) == 0:
        return sum(
            (lam * (1 - distance_sq(b, L.family())) for lam, b in S.prefix(S.length)),
            Fraction(0),
        )
    return None


def check_additivity(S: AnyState, P: Subspace, Q: Subspace, n: int = 32) -> AdditivityReport:
    """Check ``s(P v Q) = s(P) + s(Q)`` for orthogonal ``P`` and ``Q``.

    Pure states and finite mixtures are compared exactly.  Infinite mixtures
    are compared through ``n``-term enclosures, and the identity is reported
    as holding when the enclosures are consistent.
    """
    if not orthogonal(P, Q):
        raise DomainError("additivity requires P orthogonal to Q")
    J = orthogonal_join(P, Q)
    vals = [_exact_value(S, L) for L in (P, Q, J)]
    if vals[0] is not None:
        sp, sq, sj = vals
        return AdditivityReport(sp, sq, sj, sp + sq == sj)
    ip, iq, ij = (mixed_eval(S, L, n) for L in (P, Q, J))
    total = ip + iq
    holds = total.lo <= ij.hi and ij.lo <= total.hi
    return AdditivityReport(ip, iq, ij, holds)


def trace_eval(weights: Sequence[tuple[object, Vector]], L: Subspace) -> Fraction:
    """``tr(D P_L)`` for ``D = sum w_k |b_k><b_k|`` with unit ``b_k``.

    Uses ``<b, P_L b> = |P_L b|^2`` term by term; an oracle for finite-rank
    density operators, independent of the orthogonality of the ``b_k``.
    """
    fam = L.family()
    return sum((Fraction(w) * projection_norm2(b, fam) for w, b in weights), Fraction(0))
