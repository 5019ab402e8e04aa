"""JSON forms of the library's values.

Rationals are strings ``"p/q"`` (``"p"`` for integers) and Gaussian rationals
``"p/q+r/si"``; every encoder emits keys in a fixed order so that output is
byte-stable, and every decoder inverts its encoder exactly.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .arith import (
    DomainError,
    GaussianRational,
    ParseError,
    RationalInterval,
    format_gaussian,
    format_rational,
    parse_gaussian,
    parse_rational,
)
from .hilbert import OrthogonalFamily, Vector
from .lattice import Certificate, Subspace
from .spectral import BoundedOperator, ClosedRationalSet, PLFunction
from .states import State


def _rat(text: Any) -> Fraction:
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"rationals are written as strings, got {text!r}")
    return parse_rational(text)


def _index(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ParseError(f"not a natural-number index: {value!r}")
    return value


def _expect(obj: Any, key: str, kind: type):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise ParseError(f"field {key!r} has the wrong type")
    return value


# vectors ---------------------------------------------------------------


def vector_to_json(v: Vector) -> dict:
    return {"entries": [[k, format_rational(z.re), format_rational(z.im)] for k, z in v.items()]}


def vector_from_json(obj: Any) -> Vector:
    entries = _expect(obj, "entries", list)
    out: dict[int, GaussianRational] = {}
    for item in entries:
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise ParseError(f"vector entry must be [index, re, im]: {item!r}")
        k = _index(item[0])
        if k in out:
            raise ParseError(f"duplicate vector index {k}")
        im = _rat(item[2]) if len(item) == 3 else Fraction(0)
        out[k] = GaussianRational(_rat(item[1]), im)
    return Vector(out)


def family_to_json(f: OrthogonalFamily) -> list:
    return [vector_to_json(v) for v in f]


def family_from_json(obj: Any) -> OrthogonalFamily:
    if not isinstance(obj, list):
        raise ParseError("an orthogonal family is a list of vectors")
    return OrthogonalFamily(vector_from_json(v) for v in obj)


# subspaces and certificates ------------------------------------------


def subspace_to_json(L: Subspace) -> dict:
    out: dict[str, Any] = {"generators": [vector_to_json(g) for g in _listed_generators(L)]}
    const = getattr(L, "declared_tail", None)
    if const is not None:
        out["tail_bound"] = format_rational(const)
    return out


def _listed_generators(L: Subspace) -> tuple[Vector, ...]:
    if L.is_finite:
        return L.generators
    listed = getattr(L, "listed_generators", None)
    if listed is None:
        raise DomainError("only finite or JSON-born subspaces can be serialised")
    return listed


def subspace_from_json(obj: Any) -> Subspace:
    """A finite presentation, or with ``"tail_bound": "t"`` a prefix of a larger space.

    In the second case the listed generators span ``L_n`` for every ``n`` and
    ``t`` bounds how much the unlisted ones can lower any distance; the result
    is coded as a countable presentation with the constant tail bound ``t``.
    """
    gens = [vector_from_json(g) for g in _expect(obj, "generators", list)]
    tail = obj.get("tail_bound")
    if tail is None:
        return Subspace(gens)
    t = _rat(tail)
    if t < 0:
        raise DomainError("tail bound must be nonnegative")
    listed = tuple(gens)

    def enumerator(n: int):
        if not listed:
            return Vector()
        return listed[min(n, len(listed) - 1)]

    L = Subspace.countable(enumerator, lambda n, c: t)
    L.declared_tail = t
    L.listed_generators = listed
    return L


def certificate_to_json(cert: Certificate) -> dict:
    return {"c": vector_to_json(cert.c), "r": format_rational(cert.r)}


def certificate_from_json(obj: Any) -> Certificate:
    return Certificate(vector_from_json(_expect(obj, "c", dict)), _rat(_expect(obj, "r", str)))


# states ----------------------------------------------------------------


def state_to_json(S: State, geometric_ratio: Fraction | None = None, prefix: int | None = None) -> dict:
    n = S.length if S.length is not None else prefix
    if n is None:
        raise DomainError("infinite states need a prefix length to serialise")
    terms = [[format_rational(lam), vector_to_json(b)] for lam, b in S.prefix(n)]
    if S.length is not None and geometric_ratio is None:
        tail = {"type": "finite"}
    else:
        if geometric_ratio is None:
            raise DomainError("infinite states serialise with their geometric ratio")
        tail = {"type": "geometric", "ratio": format_rational(geometric_ratio)}
    return {"terms": terms, "tail": tail}


def state_from_json(obj: Any) -> State:
    """``finite`` mixtures must sum to 1.  ``geometric`` lists a prefix of an
    infinite mixture whose later weights decay at least by ``ratio``; only the
    listed terms are available and the tail bound covers the rest."""
    raw = _expect(obj, "terms", list)
    terms = []
    for item in raw:
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"state term must be [weight, vector]: {item!r}")
        terms.append((_rat(item[0]), vector_from_json(item[1])))
    tail = obj.get("tail", {"type": "finite"})
    kind = _expect(tail, "type", str)
    if kind == "finite":
        return State.finite(terms)
    if kind == "geometric":
        ratio = _rat(_expect(tail, "ratio", str))
        if not terms:
            raise DomainError("a geometric state needs at least one listed term")
        S = State.geometric(lambda n: terms[n], ratio)
        S._length = len(terms)
        if sum(lam for lam, _ in terms) > 1:
            raise DomainError("weights exceed 1")
        return S
    raise ParseError(f"unknown tail type {kind!r}")


# operators and functions ----------------------------------------------


def operator_to_json(A: BoundedOperator) -> dict:
    if A.kind == "diagonal":
        return {"kind": "diagonal", "entries": [format_rational(e) for e in A.data]}
    if A.kind == "banded":
        return {
            "kind": "banded",
            "band": A.band,
            "entries": [[d, format_rational(z.re), format_rational(z.im)] for d, z in sorted(A.data.items())],
        }
    if A.kind == "finite":
        return {
            "kind": "finite",
            "size": A.size,
            "entries": [
                [i, j, format_rational(z.re), format_rational(z.im)] for (i, j), z in sorted(A.data.items())
            ],
        }
    raise DomainError(f"operators of kind {A.kind!r} have no JSON form")


def operator_from_json(obj: Any) -> BoundedOperator:
    kind = _expect(obj, "kind", str)
    entries = _expect(obj, "entries", list)
    if kind == "diagonal":
        return BoundedOperator.diagonal([_rat(e) for e in entries])
    if kind == "banded":
        diag = {}
        for item in entries:
            if not isinstance(item, list) or len(item) not in (2, 3):
                raise ParseError(f"banded entry must be [d, re, im]: {item!r}")
            im = _rat(item[2]) if len(item) == 3 else Fraction(0)
            diag[_index(item[0])] = GaussianRational(_rat(item[1]), im)
        A = BoundedOperator.banded_toeplitz(diag)
        if "band" in obj and obj["band"] != A.band:
            raise ParseError("declared band disagrees with the entries")
        return A
    if kind == "finite":
        m = {}
        for item in entries:
            if not isinstance(item, list) or len(item) not in (3, 4):
                raise ParseError(f"matrix entry must be [i, j, re, im]: {item!r}")
            im = _rat(item[3]) if len(item) == 4 else Fraction(0)
            m[(_index(item[0]), _index(item[1]))] = GaussianRational(_rat(item[2]), im)
        size = obj.get("size")
        return BoundedOperator.finite(m, size=None if size is None else _index(size))
    raise ParseError(f"unknown operator kind {kind!r}")


def plfunction_to_json(f: PLFunction) -> dict:
    return {"breakpoints": [[format_rational(t), format_rational(v)] for t, v in f.breakpoints]}


def plfunction_from_json(obj: Any) -> PLFunction:
    pts = []
    for item in _expect(obj, "breakpoints", list):
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"breakpoint must be [t, v]: {item!r}")
        pts.append((_rat(item[0]), _rat(item[1])))
    return PLFunction(pts)


# generic ------------------------------------------------------------------


def to_jsonable(value: Any) -> Any:
    """Recursively replace library values by their JSON forms."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, GaussianRational):
        return format_gaussian(value)
    if isinstance(value, Vector):
        return vector_to_json(value)
    if isinstance(value, RationalInterval):
        return [format_rational(value.lo), format_rational(value.hi)]
    if isinstance(value, Certificate):
        return certificate_to_json(value)
    if isinstance(value, ClosedRationalSet):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps(value: Any) -> str:
    """Compact, key-order-preserving JSON."""
    return json.dumps(to_jsonable(value), ensure_ascii=False, separators=(",", ":"))


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def parse_gaussian_json(text: Any) -> GaussianRational:
    if not isinstance(text, str):
        raise ParseError(f"Gaussian rationals are written as strings, got {text!r}")
    return parse_gaussian(text)
