"""Exact arithmetic in a real quadratic field Q(sqrt(d)) and in the plane over it.

Every comparison made anywhere in the package goes through :func:`qsign`,
which decides the sign of ``p + q*sqrt(d)`` from rational data only.

Elements with ``q == 0`` are plain rationals and are stored with ``d = 1``;
they combine freely with elements of any field.  Combining two irrational
elements with different radicands raises :class:`FieldMismatchError`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


class FieldMismatchError(ValueError):
    pass


def _is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _join(d1: int, d2: int) -> int:
    if d1 == 1:
        return d2
    if d2 == 1 or d1 == d2:
        return d1
    raise FieldMismatchError(f"cannot mix Q(sqrt({d1})) and Q(sqrt({d2}))")


class QuadElem:
    """``p + q*sqrt(d)`` with ``p, q`` rational.  Immutable."""

    __slots__ = ("p", "q", "d")

    def __init__(self, p: Rational = 0, q: Rational = 0, d: int = 1):
        p = Fraction(p)
        q = Fraction(q)
        if d != 1 and not _is_squarefree(d):
            raise ValueError(f"radicand {d} is not squarefree")
        if d == 1:
            p, q = p + q, Fraction(0)
        if q == 0:
            d = 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    @staticmethod
    def coerce(x) -> "QuadElem":
        if isinstance(x, QuadElem):
            return x
        if isinstance(x, (int, Fraction)):
            return QuadElem(x)
        if isinstance(x, str):
            return parse_quad(x)
        raise TypeError(f"cannot convert {type(x).__name__} to QuadElem")

    # -- predicates ---------------------------------------------------------
    def is_rational(self) -> bool:
        return self.q == 0

    def is_integer(self) -> bool:
        return self.q == 0 and self.p.denominator == 1

    def sign(self) -> int:
        return qsign(self)

    def __bool__(self) -> bool:
        return self.p != 0 or self.q != 0

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElem(self.p + o.p, self.q + o.q, _join(self.d, o.d))

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.p, -self.q, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElem(self.p - o.p, self.q - o.q, _join(self.d, o.d))

    def __rsub__(self, other):
        return QuadElem.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        d = _join(self.d, o.d)
        return QuadElem(self.p * o.p + self.q * o.q * d, self.p * o.q + self.q * o.p, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.d

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadElem(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QuadElem.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QuadElem(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return -self if qsign(self) < 0 else self

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self.p == o.p and self.q == o.q and (self.q == 0 or self.d == o.d)

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __lt__(self, other):
        return qsign(self - other) < 0

    def __le__(self, other):
        return qsign(self - other) <= 0

    def __gt__(self, other):
        return qsign(self - other) > 0

    def __ge__(self, other):
        return qsign(self - other) >= 0

    def floor(self) -> int:
        """Exact floor."""
        n = int(self.approx() // 1)
        # float guess, then correct by exact comparisons
        while QuadElem(n) > self:
            n -= 1
        while QuadElem(n + 1) <= self:
            n += 1
        return n

    def approx(self) -> float:
        return float(self.p) + float(self.q) * self.d ** 0.5

    def __float__(self):
        return self.approx()

    def __repr__(self):
        return f"QuadElem({format_quad(self)!r})"

    def __str__(self):
        return format_quad(self)


def qsign(x: QuadElem) -> int:
    """Exact sign of ``p + q*sqrt(d)``."""
    sp = (x.p > 0) - (x.p < 0)
    sq = (x.q > 0) - (x.q < 0)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: compare p^2 with q^2 d
    lhs = x.p * x.p
    rhs = x.q * x.q * x.d
    if lhs > rhs:
        return sp
    return sq  # lhs == rhs impossible for squarefree d > 1


def sqrt(d: int) -> QuadElem:
    return QuadElem(0, 1, d)


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_quad(x: QuadElem) -> str:
    """Lossless literal: ``p/q`` or ``p/q+r/s*sqrt(d)``."""
    if x.q == 0:
        return _fmt_frac(x.p)
    q = _fmt_frac(x.q)
    if x.q > 0:
        q = "+" + q
    return f"{_fmt_frac(x.p)}{q}*sqrt({x.d})"


_FRAC = r"[+-]?\d+(?:/\d+)?"
_QUAD_RE = re.compile(rf"^\s*({_FRAC})\s*(?:([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\((\d+)\))?\s*$")


def parse_quad(text: str) -> QuadElem:
    m = _QUAD_RE.match(text)
    if m is None:
        raise ValueError(f"bad field literal: {text!r}")
    p = Fraction(m.group(1))
    if m.group(2) is None:
        return QuadElem(p)
    q = Fraction(m.group(3))
    if m.group(2) == "-":
        q = -q
    return QuadElem(p, q, int(m.group(4)))


@dataclass(frozen=True)
class FieldContext:
    """The field Q(sqrt(d)) fixed for one computation."""

    d: int = 1

    def __post_init__(self):
        if self.d != 1 and (self.d < 2 or not _is_squarefree(self.d)):
            raise ValueError(f"d must be 1 or a squarefree integer >= 2, got {self.d}")

    def elem(self, p: Rational = 0, q: Rational = 0) -> QuadElem:
        if self.d == 1 and q != 0:
            raise ValueError("irrational part given for the rational field")
        return QuadElem(p, q, self.d)

    def root(self) -> QuadElem:
        if self.d == 1:
            raise ValueError("rational field has no irrational root")
        return QuadElem(0, 1, self.d)

    def check(self, x: QuadElem) -> QuadElem:
        if x.d not in (1, self.d):
            raise FieldMismatchError(f"element of Q(sqrt({x.d})) in context d={self.d}")
        return x


class PlanePoint:
    """Point ``re + i*im`` of the plane with exact coordinates."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", QuadElem.coerce(re))
        object.__setattr__(self, "im", QuadElem.coerce(im))

    def __setattr__(self, name, value):
        raise AttributeError("PlanePoint is immutable")

    @staticmethod
    def coerce(z) -> "PlanePoint":
        if isinstance(z, PlanePoint):
            return z
        if isinstance(z, complex):
            raise TypeError("floating complex values are not exact")
        if isinstance(z, str):
            return parse_point(z)
        return PlanePoint(z, 0)

    def __add__(self, other):
        o = PlanePoint.coerce(other)
        return PlanePoint(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = PlanePoint.coerce(other)
        return PlanePoint(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return PlanePoint.coerce(other) - self

    def __neg__(self):
        return PlanePoint(-self.re, -self.im)

    def __mul__(self, k):
        """Scale by a real scalar (int, Fraction or QuadElem)."""
        if isinstance(k, PlanePoint):
            return PlanePoint(self.re * k.re - self.im * k.im, self.re * k.im + self.im * k.re)
        k = QuadElem.coerce(k)
        return PlanePoint(self.re * k, self.im * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = QuadElem.coerce(k)
        return PlanePoint(self.re / k, self.im / k)

    def __eq__(self, other):
        try:
            o = PlanePoint.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def approx(self) -> complex:
        return complex(self.re.approx(), self.im.approx())

    def __repr__(self):
        return f"PlanePoint({format_point(self)!r})"

    def __str__(self):
        return format_point(self)


I = PlanePoint(0, 1)


def det2(u: PlanePoint, v: PlanePoint) -> QuadElem:
    """``Im(conj(u) * v)``, the oriented area of the parallelogram (u, v)."""
    return u.re * v.im - u.im * v.re


def dot(u: PlanePoint, v: PlanePoint) -> QuadElem:
    return u.re * v.re + u.im * v.im


def norm_sq(u: PlanePoint) -> QuadElem:
    return u.re * u.re + u.im * u.im


def format_point(z: PlanePoint) -> str:
    """``(re, im)`` using the field literal syntax for both coordinates."""
    return f"({format_quad(z.re)}, {format_quad(z.im)})"


def parse_point(text: str) -> PlanePoint:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"bad plane point literal: {text!r}")
    parts = s[1:-1].split(",")
    if len(parts) != 2:
        raise ValueError(f"bad plane point literal: {text!r}")
    return PlanePoint(parse_quad(parts[0]), parse_quad(parts[1]))
