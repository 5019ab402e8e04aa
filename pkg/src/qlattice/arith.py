"""Exact scalars: rationals, Gaussian rationals, rational intervals, upper reals
and fuel-bounded semidecisions.

Rationals are :class:`fractions.Fraction`.  Nothing in this module touches
floating point.
"""
from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Union

Rational = Fraction
RationalLike = Union[int, Fraction]


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ParseError(ValueError):
    """A textual or JSON encoding could not be decoded."""


# ---------------------------------------------------------------------------
# rationals


def rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise ParseError(f"not a rational: {value!r}")


_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    m = _RAT_RE.match(text)
    if not m:
        raise ParseError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rat_div(a: RationalLike, b: RationalLike) -> Fraction:
    if b == 0:
        raise DomainError("division by zero")
    return Fraction(a) / Fraction(b)


def rat_cmp(a: RationalLike, b: RationalLike) -> int:
    """Three-way exact comparison: -1, 0 or 1."""
    a, b = Fraction(a), Fraction(b)
    return (a > b) - (a < b)


# ---------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    """A complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise DomainError("floating point complex values are not exact")
        if isinstance(value, str):
            return parse_gaussian(value)
        return cls(rat(value), 0)

    def __add__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        n = other.abs2()
        if n == 0:
            raise DomainError("division by zero")
        num = self * other.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """``|z|**2`` as an exact rational."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussianRational({format_gaussian(self)!r})"

    def __str__(self):
        return format_gaussian(self)


def _as_gauss(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return GaussianRational(value, 0)
    return NotImplemented


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"p/q"``, ``"p/q+r/si"``, ``"p/q-r/si"`` or ``"-r/si"``."""
    t = text.strip()
    if not t:
        raise ParseError("empty Gaussian rational")
    if t.endswith("i"):
        # split on the last sign that is not in leading position
        body = t[:-1]
        idx = max(body.rfind("+"), body.rfind("-"))
        if idx <= 0:
            real_part, imag_part = "0", body or "1"
            if imag_part in ("+", "-"):
                imag_part += "1"
        else:
            real_part, imag_part = body[:idx], body[idx:]
            if imag_part in ("+", "-"):
                imag_part += "1"
        try:
            return GaussianRational(parse_rational(real_part), parse_rational(imag_part))
        except ParseError:
            raise ParseError(f"not a Gaussian rational: {text!r}") from None
    return GaussianRational(parse_rational(t), 0)


def format_gaussian(z: GaussianRational) -> str:
    if z.im == 0:
        return format_rational(z.re)
    sign = "-" if z.im < 0 else "+"
    return f"{format_rational(z.re)}{sign}{format_rational(abs(z.im))}i"


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q: RationalLike) -> "RationalInterval":
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains(self, q) -> bool:
        if isinstance(q, RationalInterval):
            return self.lo <= q.lo and q.hi <= self.hi
        return self.lo <= q <= self.hi

    __contains__ = contains

    def __add__(self, other):
        other = _as_interval(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_interval(other)
        return RationalInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _as_interval(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lo <= 0 <= other.hi:
            raise DomainError("interval division by an interval containing 0")
        return self * RationalInterval(1 / other.hi, 1 / other.lo)

    def square(self) -> "RationalInterval":
        if self.lo >= 0:
            return RationalInterval(self.lo**2, self.hi**2)
        if self.hi <= 0:
            return RationalInterval(self.hi**2, self.lo**2)
        return RationalInterval(0, max(self.lo**2, self.hi**2))

    def hull(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def _as_interval(value) -> RationalInterval:
    if isinstance(value, RationalInterval):
        return value
    return RationalInterval.point(Fraction(value))


DEFAULT_SQRT_PRECISION = Fraction(1, 2**40)


def _sqrt_bounds(q: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= sqrt(q) <= hi`` with ``hi - lo <= eps``."""
    if q == 0:
        return Fraction(0), Fraction(0)
    p, d = q.numerator, q.denominator
    # sqrt(p/d) = sqrt(p*d)/d; scale by m so that 1/(d*m) <= eps
    m = max(1, math.ceil(1 / (eps * d)))
    s = math.isqrt(p * d * m * m)
    lo = Fraction(s, d * m)
    if s * s == p * d * m * m:
        return lo, lo
    return lo, Fraction(s + 1, d * m)


def interval_sqrt(
    x: RationalInterval, eps: Fraction = DEFAULT_SQRT_PRECISION
) -> RationalInterval:
    """Outward-rounded square root of a nonnegative interval.

    The result contains ``sqrt(t)`` for every ``t`` in ``x``; each endpoint is
    rounded by at most ``eps``.
    """
    if x.lo < 0:
        raise DomainError(f"square root of negative interval {x}")
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("precision must be positive")
    lo, _ = _sqrt_bounds(x.lo, eps)
    _, hi = _sqrt_bounds(x.hi, eps)
    return RationalInterval(lo, hi)


def sqrt_upper(q: RationalLike, eps: Fraction = DEFAULT_SQRT_PRECISION) -> Fraction:
    return interval_sqrt(RationalInterval.point(Fraction(q)), eps).hi


def sqrt_lower(q: RationalLike, eps: Fraction = DEFAULT_SQRT_PRECISION) -> Fraction:
    return interval_sqrt(RationalInterval.point(Fraction(q)), eps).lo


# ---------------------------------------------------------------------------
# upper reals


class MonotonicityError(AssertionError):
    """An upper-real stream produced an increasing bound."""


class UpperReal:
    """A real number known only through a non-increasing stream of rational
    upper bounds; the value is the infimum of the stream.

    ``source`` is a zero-argument callable returning a fresh iterator, so the
    stream can be replayed by any number of independent consumers.  Every
    replay checks monotonicity as it goes.
    """

    __slots__ = ("_source",)

    def __init__(self, source: Callable[[], Iterable[RationalLike]]):
        self._source = source

    @classmethod
    def constant(cls, q: RationalLike) -> "UpperReal":
        q = Fraction(q)
        return cls(lambda: itertools.repeat(q))

    @classmethod
    def from_function(cls, bound: Callable[[int], RationalLike]) -> "UpperReal":
        """Stream ``bound(1), bound(2), ...``."""
        return cls(lambda: (Fraction(bound(n)) for n in itertools.count(1)))

    def bounds(self) -> Iterator[Fraction]:
        prev = None
        for b in self._source():
            b = Fraction(b)
            if prev is not None and b > prev:
                raise MonotonicityError(f"upper bound increased from {prev} to {b}")
            prev = b
            yield b

    def prefix(self, n: int) -> list[Fraction]:
        return list(itertools.islice(self.bounds(), n))

    def __iter__(self):
        return self.bounds()


def upper_refine(u: UpperReal, steps: int) -> Fraction:
    """The ``steps``-th bound of ``u`` (1-based)."""
    if steps < 1:
        raise DomainError("steps must be >= 1")
    for k, b in enumerate(u.bounds(), start=1):
        if k == steps:
            return b
    raise DomainError(f"upper real stream ended before {steps} bounds")


# ---------------------------------------------------------------------------
# semidecisions


class Verdict(enum.Enum):
    CONFIRMED = "confirmed"
    UNKNOWN = "unknown"

    def __bool__(self):
        return self is Verdict.CONFIRMED


CONFIRMED = Verdict.CONFIRMED
UNKNOWN = Verdict.UNKNOWN


class Semidecision:
    """A Sierpinski-valued proposition observed with bounded effort.

    ``probe(fuel)`` returns True when the proposition has been confirmed within
    ``fuel`` steps.  There is no way to observe falsity: an unconfirmed probe
    reports :data:`UNKNOWN`.
    """

    __slots__ = ("_probe",)

    def __init__(self, probe: Callable[[int], bool]):
        self._probe = probe

    @classmethod
    def from_steps(cls, steps: Callable[[], Iterable[bool]]) -> "Semidecision":
        """Confirmed at fuel ``f`` iff one of the first ``f`` steps succeeds."""

        def probe(fuel: int) -> bool:
            return any(itertools.islice(steps(), fuel))

        return cls(probe)

    def __call__(self, fuel: int) -> Verdict:
        if fuel < 1:
            raise DomainError("fuel must be >= 1")
        return CONFIRMED if self._probe(fuel) else UNKNOWN

    def first_confirmation(self, max_fuel: int) -> int | None:
        """Least fuel <= ``max_fuel`` at which the probe confirms, if any."""
        lo, hi = 1, max_fuel
        if not self(hi):
            return None
        while lo < hi:
            mid = (lo + hi) // 2
            if self(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo


def semidecide_less(u: UpperReal, q: RationalLike) -> Semidecision:
    """Semidecide ``value(u) < q`` by scanning the first ``fuel`` bounds."""
    q = Fraction(q)
    return Semidecision.from_steps(lambda: (b < q for b in u.bounds()))
