"""Convergence checks for operator and subspace sequences, and three
counterexamples showing which lattice operations fail to be continuous.

Convergence is only ever observed on finitely many probes over a finite
horizon; reports say which probes and which horizon.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .arith import DomainError, parse_rational
from .hilbert import Vector
from .lattice import Subspace, meet, ortho_complement_finite, same_subspace
from .spectral import BoundedOperator, apply_truncated
from .states import PureState, pure_eval


@dataclass
class OperatorSequence:
    at: Callable[[int], BoundedOperator]
    limit: Optional[BoundedOperator] = None
    name: str = "custom"

    @classmethod
    def left_shift_powers(cls) -> "OperatorSequence":
        return cls(BoundedOperator.left_shift, BoundedOperator.zero(), "left-shift")

    @classmethod
    def right_shift_powers(cls) -> "OperatorSequence":
        return cls(BoundedOperator.right_shift, BoundedOperator.zero(), "right-shift")

    @classmethod
    def truncations(cls) -> "OperatorSequence":
        """``P_n``, the projection onto the first ``n`` coordinates."""
        return cls(BoundedOperator.coordinate_projection, BoundedOperator.identity(), "truncation")


@dataclass
class SubspaceSequence:
    at: Callable[[int], Subspace]


def _apply(A: BoundedOperator, x: Vector, horizon: int) -> tuple[Vector, Fraction]:
    if A.exact:
        return A.apply(x), Fraction(0)
    return apply_truncated(A, x, horizon)


@dataclass
class ProbeReport:
    probe: Vector
    n0: Optional[int]
    distances2: list[Fraction]
    sup_norm2: Fraction
    converged: bool

    def as_dict(self) -> dict:
        return {
            "probe": self.probe,
            "n0": self.n0,
            "converged": self.converged,
            "sup_norm2": self.sup_norm2,
            "final_distance2": self.distances2[-1],
        }


@dataclass
class SOTReport:
    per_probe: list[ProbeReport]
    horizon: int
    eps: Fraction
    n0: Optional[int] = field(init=False)
    verdict: str = field(init=False)

    def __post_init__(self):
        if all(p.converged for p in self.per_probe):
            self.n0 = max((p.n0 for p in self.per_probe), default=0)
            self.verdict = "converged"
        else:
            self.n0 = None
            self.verdict = "not converged"

    def as_dict(self) -> dict:
        return {
            "n0": self.n0,
            "per_probe": [p.as_dict() for p in self.per_probe],
            "verdict": self.verdict,
            "horizon": self.horizon,
            "eps": self.eps,
            "coverage": f"{len(self.per_probe)} probe(s), n = 0..{self.horizon}",
        }


def sot_check(
    seq: OperatorSequence,
    T: Optional[BoundedOperator],
    probes: Sequence[Vector],
    eps,
    N: int,
) -> SOTReport:
    """Check ``|T_n x - T x|^2 <= eps^2`` on a tail ``n0 <= n <= N`` for each probe.

    ``n0`` is the least index from which the inequality holds up to ``N``.
    Norms are exact for banded or finite operators; otherwise the truncation
    error is added to the distance before comparing.  ``sup_norm2`` is the
    largest ``|T_n x|^2`` seen, the uniform bound premise.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    T = T if T is not None else seq.limit
    if T is None:
        raise DomainError("no limit operator given")
    eps2 = eps * eps
    reports = []
    for x in probes:
        horizon = max(x.max_index + 1, 1) * 4 + N
        Tx, terr = _apply(T, x, horizon)
        dists, ok, sup = [], [], Fraction(0)
        for n in range(N + 1):
            y, err = _apply(seq.at(n), x, horizon)
            sup = max(sup, y.norm2())
            d2 = (y - Tx).norm2()
            slack = err + terr
            # (|u| + s)^2 <= |u|^2 + s (|u|^2 + 1) + s^2, using 2|u| <= |u|^2 + 1
            bound = d2 + slack * (d2 + 1) + slack * slack if slack else d2
            dists.append(d2)
            ok.append(bound <= eps2)
        n0 = None
        for n in range(N, -1, -1):
            if not ok[n]:
                break
            n0 = n
        reports.append(ProbeReport(x, n0, dists, sup, n0 is not None))
    return SOTReport(reports, N, eps)


# ---------------------------------------------------------------------------
# counterexamples


@dataclass
class SchroederReport:
    values: list[tuple[int, Fraction]]
    limit_value: Fraction
    all_half: bool

    conclusion = (
        "s(A_n)(e_0) = 1/2 for every n while the A_n converge to {0} and s({0})(e_0) = 0: "
        "evaluation of a state is not continuous for this topology on subspaces."
    )

    def as_dict(self) -> dict:
        return {
            "values": [{"n": n, "value": v} for n, v in self.values],
            "limit_value": self.limit_value,
            "all_half": self.all_half,
            "conclusion": self.conclusion,
        }


def demo_schroeder(max_n: int) -> SchroederReport:
    """``A_n = span(e_0 + e_n)`` and the pure state of ``e_0``."""
    if max_n < 1:
        raise DomainError("max_n must be >= 1")
    s = PureState(Vector.basis(0))
    values = [(n, pure_eval(s, Subspace.span(Vector({0: 1, n: 1})))) for n in range(1, max_n + 1)]
    limit = pure_eval(s, Subspace.zero())
    return SchroederReport(values, limit, all(v == Fraction(1, 2) for _, v in values))


def parse_weights(descriptor) -> Callable[[int], Fraction]:
    """``"geometric:1/2"`` gives ``(1/2)^k``; a list gives its entries."""
    if callable(descriptor):
        return lambda k: Fraction(descriptor(k))
    if isinstance(descriptor, (list, tuple)):
        ws = [Fraction(w) if not isinstance(w, str) else parse_rational(w) for w in descriptor]
        return lambda k: ws[k]
    if isinstance(descriptor, str) and descriptor.startswith("geometric:"):
        ratio = parse_rational(descriptor.split(":", 1)[1])
        return lambda k: ratio**k
    raise DomainError(f"unknown weight descriptor {descriptor!r}")


@dataclass
class JoinReport:
    K: int
    meets: list[tuple[int, int]]  # (n, dim of meet(P, Q_n))
    zero_below_K: bool
    contained_in_limit: bool
    meet_at_K_is_P: Optional[bool]

    note = (
        "P is a finite-support stand-in (support e_0..e_K) for a line meeting no Q_n; "
        "meet(P, Q_n) = 0 for n < K while P lies in the join of the Q_n. "
        "The full statement needs K infinite; the finite prefix is the testable content."
    )

    def as_dict(self) -> dict:
        return {
            "K": self.K,
            "meets": [{"n": n, "meet_dim": d} for n, d in self.meets],
            "zero_below_K": self.zero_below_K,
            "P_in_join": self.contained_in_limit,
            "meet_at_K_is_P": self.meet_at_K_is_P,
            "note": self.note,
        }


def demo_join_discontinuity(max_n: int, K: Optional[int] = None, weights="geometric:1/2") -> JoinReport:
    """``P = span(sum_{k<=K} w_k e_k)`` against ``Q_n = span(e_0..e_n)``.

    ``K`` defaults to ``max_n + 1``.  With ``K <= max_n`` the report also
    shows the meet becoming ``P`` at ``n = K``.
    """
    K = max_n + 1 if K is None else K
    w = parse_weights(weights)
    coeffs = {k: w(k) for k in range(K + 1)}
    if any(c == 0 for c in coeffs.values()):
        raise DomainError("all weights must be nonzero")
    P = Subspace.span(Vector(coeffs))
    meets = []
    at_K = None
    for n in range(max_n + 1):
        Q = Subspace.span(*(Vector.basis(k) for k in range(n + 1)))
        M = meet(P, Q)
        meets.append((n, M.dim))
        if n == K:
            at_K = same_subspace(M, P)
    limit = Subspace.span(*(Vector.basis(k) for k in range(K + 1)))
    return JoinReport(
        K,
        meets,
        all(d == 0 for n, d in meets if n < K),
        limit.contains(P.generators[0]),
        at_K,
    )


@dataclass
class BiorthReport:
    x: Vector
    lines: list[tuple[int, bool]]  # (n, C_n^perp-perp == span(x))
    intersection_empty: bool

    note = (
        "C_n = {m x : m >= n} shrinks to nothing while every C_n^perp-perp is the line "
        "through x: double orthocomplementation is not continuous."
    )

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "lines": [{"n": n, "is_line": ok} for n, ok in self.lines],
            "intersection_empty": self.intersection_empty,
            "note": self.note,
        }


def demo_biorth_discontinuity(max_n: int, x: Optional[Vector] = None, window: int = 3) -> BiorthReport:
    """``C_n^perp-perp`` for the truncations ``{m x : n <= m <= n + window}``.

    The ambient space is ``span(e_0, ..., e_{max index of x + 1})``.
    The sets ``{m x : n <= m <= max_n}`` for ``n = 1..max_n + 1`` have empty
    intersection, the finite counterpart of ``C_n`` meeting only in 0.
    """
    if max_n < 1:
        raise DomainError("max_n must be >= 1")
    if x is None:
        x = Vector.dense([Fraction(3, 5), Fraction(4, 5)])
    if x.norm2() != 1:
        raise DomainError("x must be exactly unit")
    ambient = x.max_index + 2
    line = Subspace.span(x)
    lines = []
    for n in range(1, max_n + 1):
        C = Subspace([x.scale(m) for m in range(n, n + window + 1)])
        perp = ortho_complement_finite(C, ambient)
        lines.append((n, same_subspace(ortho_complement_finite(perp, ambient), line)))
    common = set(range(1, max_n + 1))
    for n in range(1, max_n + 2):
        common &= set(range(n, max_n + 1))
    return BiorthReport(x, lines, not common)


# ---------------------------------------------------------------------------
# lattice convergence


@dataclass
class ConvergeReport:
    violations: list[dict]
    horizon: int
    verdict: str

    def as_dict(self) -> dict:
        return {"violations": self.violations, "horizon": self.horizon, "verdict": self.verdict}


def lattice_converge_check(
    seq: SubspaceSequence,
    limit: Subspace,
    probes: Sequence[tuple[Callable[[int], Vector], Vector]],
    horizon: int = 32,
) -> ConvergeReport:
    """Check the sequence condition for ``L_n -> L`` on the given probes.

    For a probe ``(x_n) -> x_inf`` (the limit is taken as declared), if
    ``x_n`` lies in ``L_n`` for infinitely many ``n`` then ``x_inf`` must lie in
    ``L``.  "Infinitely many" is read as "at some ``n`` in the second half of
    ``0..horizon``".
    """
    violations = []
    for idx, (xs, x_inf) in enumerate(probes):
        hits = [n for n in range(horizon + 1) if seq.at(n).contains(xs(n))]
        late = [n for n in hits if 2 * n >= horizon]
        if late and not limit.contains(x_inf):
            violations.append(
                {
                    "probe": idx,
                    "hits": len(hits),
                    "last_hit": hits[-1],
                    "final_distance2": (xs(horizon) - x_inf).norm2(),
                }
            )
    return ConvergeReport(violations, horizon, "violation" if violations else "consistent")
