"""Exact complex-rational scalars and certified rational enclosures.

All coefficient arithmetic in the package runs over Q(i): a Scalar is a pair
of `fractions.Fraction`s.  Absolute values are emitted exactly when the
squared modulus is a perfect rational square, and otherwise as an Enclosure
(an interval with exact rational endpoints and a controlled width).
"""

from __future__ import annotations

import math
from fractions import Fraction

DEFAULT_ABS_WIDTH = Fraction(1, 2**80)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class Scalar:
    """An element of Q(i), exact."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "Scalar":
        return cls(0, 0)

    @classmethod
    def one(cls) -> "Scalar":
        return cls(1, 0)

    @classmethod
    def i(cls) -> "Scalar":
        return cls(0, 1)

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot coerce {value!r} to Scalar")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = Scalar.coerce(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __sub__(self, other) -> "Scalar":
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other) -> "Scalar":
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        other = Scalar.coerce(other)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = Scalar.coerce(other)
        d = other.abs_squared()
        if d == 0:
            raise ZeroDivisionError("division by zero Scalar")
        conj = other.conjugate()
        num = self * conj
        return Scalar(num.re / d, num.im / d)

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def is_real(self) -> bool:
        return self.im == 0

    # -- modulus -------------------------------------------------------

    def abs_exact(self) -> Fraction | None:
        """|self| as a Fraction, or None when irrational."""
        return rational_sqrt(self.abs_squared())

    def abs_enclosure(self, max_width: Fraction = DEFAULT_ABS_WIDTH) -> "Enclosure":
        exact = self.abs_exact()
        if exact is not None:
            return Enclosure.exact(exact)
        return sqrt_enclosure(self.abs_squared(), max_width)

    # -- comparison / hashing -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        raise ValueError("negative radicand")
    if q == 0:
        return Fraction(0)
    p, d = q.numerator, q.denominator
    rp, rd = math.isqrt(p), math.isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None


def sqrt_enclosure(q: Fraction, max_width: Fraction = DEFAULT_ABS_WIDTH) -> "Enclosure":
    """Enclose sqrt(q) in a rational interval of width <= max_width."""
    if q < 0:
        raise ValueError("negative radicand")
    exact = rational_sqrt(q)
    if exact is not None:
        return Enclosure.exact(exact)
    p, d = q.numerator, q.denominator
    # sqrt(p/d) = sqrt(p*d)/d; scale by 4^k so the isqrt bracket is tight enough
    k = 0
    scale = 1
    while True:
        m = p * d * scale * scale
        s = math.isqrt(m)
        lo = Fraction(s, d * scale)
        hi = Fraction(s + 1, d * scale)
        if hi - lo <= max_width:
            return Enclosure(lo, hi)
        k += 16
        scale = 1 << k


class Enclosure:
    """A closed interval [lo, hi] with exact rational endpoints.

    Used for magnitudes that may be irrational (moduli, operator norms).
    Arithmetic assumes nonnegative quantities, which is all the package
    needs; comparisons come in certified ("definitely") and consistent
    ("possibly") flavors.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _frac(lo)
        hi = lo if hi is None else _frac(hi)
        if hi < lo:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Enclosure is immutable")

    @classmethod
    def exact(cls, v) -> "Enclosure":
        v = _frac(v)
        return cls(v, v)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def expect_exact(self) -> Fraction:
        if not self.is_exact:
            raise ValueError(f"enclosure is not exact: {self}")
        return self.lo

    def __add__(self, other) -> "Enclosure":
        other = other if isinstance(other, Enclosure) else Enclosure.exact(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __mul__(self, other) -> "Enclosure":
        other = other if isinstance(other, Enclosure) else Enclosure.exact(other)
        if self.lo < 0 or other.lo < 0:
            raise ValueError("enclosure product defined for nonnegative intervals")
        return Enclosure(self.lo * other.lo, self.hi * other.hi)

    __rmul__ = __mul__

    def scaled(self, c: Fraction) -> "Enclosure":
        c = _frac(c)
        if c < 0:
            raise ValueError("nonnegative scale expected")
        return Enclosure(self.lo * c, self.hi * c)

    def union(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(max(self.lo, other.lo), min(self.hi, other.hi))

    def contains(self, v) -> bool:
        v = _frac(v)
        return self.lo <= v <= self.hi

    def definitely_le(self, other) -> bool:
        other = other if isinstance(other, Enclosure) else Enclosure.exact(other)
        return self.hi <= other.lo

    def definitely_lt(self, other) -> bool:
        other = other if isinstance(other, Enclosure) else Enclosure.exact(other)
        return self.hi < other.lo

    def possibly_le(self, other) -> bool:
        """No certified violation of self <= other."""
        other = other if isinstance(other, Enclosure) else Enclosure.exact(other)
        return self.lo <= other.hi

    def __eq__(self, other):
        if not isinstance(other, Enclosure):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        if self.is_exact:
            return f"Enclosure({str(self.lo)!r})"
        return f"Enclosure({str(self.lo)!r}, {str(self.hi)!r})"

    def __float__(self):
        return float(self.midpoint)


def enclosure_max(items) -> Enclosure:
    items = list(items)
    if not items:
        raise ValueError("max of no enclosures")
    return Enclosure(max(e.lo for e in items), max(e.hi for e in items))


def enclosure_sum(items) -> Enclosure:
    total = Enclosure.exact(0)
    for e in items:
        total = total + e
    return total


# -- string forms ------------------------------------------------------

def format_fraction(q: Fraction) -> str:
    q = _frac(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    """Canonical text form: "p/q", "p/q+r/si", "p/q-r/si", "r/si", "0"."""
    if s.im == 0:
        return format_fraction(s.re)
    im_part = ("" if abs(s.im) == 1 else format_fraction(abs(s.im))) + "i"
    sign = "+" if s.im > 0 else "-"
    if s.re == 0:
        return im_part if s.im > 0 else "-" + im_part
    return format_fraction(s.re) + sign + im_part


def parse_scalar(text: str) -> Scalar:
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty scalar text")
    try:
        if not t.endswith("i"):
            return Scalar(Fraction(t), 0)
        body = t[:-1]
        # split at the last top-level sign; a leading sign belongs to the
        # imaginary part ("-3i"), as does the whole body when no split exists
        for p in range(len(body) - 1, 0, -1):
            if body[p] in "+-":
                re_txt, im_txt = body[:p], body[p:]
                break
        else:
            re_txt, im_txt = "", body
        if im_txt in ("", "+"):
            im_part = Fraction(1)
        elif im_txt == "-":
            im_part = Fraction(-1)
        else:
            im_part = Fraction(im_txt)
        re_part = Fraction(re_txt) if re_txt else Fraction(0)
        return Scalar(re_part, im_part)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse scalar {text!r}") from exc
