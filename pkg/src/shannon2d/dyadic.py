"""Exact binary rationals ``mant * 2**exp`` and half-open intervals ``(lo, hi]``.

Every band endpoint, cell endpoint and tile boundary in the package is a
dyadic rational, so membership decisions made here never round.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "DyadicError",
    "NonPositive",
    "NotDyadic",
    "ExponentOverflow",
    "Dyadic",
    "DyadicInterval",
    "EmptyInterval",
    "EMPTY",
    "MAX_EXP",
    "normalize",
    "parse_dyadic",
    "as_dyadic",
    "exponent_locate",
    "cell_locate",
    "unit_cell",
    "interval_intersect",
    "pow2",
]

MAX_EXP = 1 << 20


class DyadicError(ValueError):
    pass


class NonPositive(DyadicError):
    pass


class NotDyadic(DyadicError):
    pass


class ExponentOverflow(DyadicError):
    pass


class Dyadic:
    """Exact value ``mant * 2**exp`` kept in canonical form.

    Canonical form has an odd mantissa, or ``mant == exp == 0`` for zero.
    """

    __slots__ = ("mant", "exp")

    def __init__(self, mant: int = 0, exp: int = 0):
        mant = int(mant)
        exp = int(exp)
        if mant == 0:
            exp = 0
        else:
            tz = (mant & -mant).bit_length() - 1
            if tz:
                mant >>= tz
                exp += tz
            if exp > MAX_EXP or exp < -MAX_EXP:
                raise ExponentOverflow(f"exponent {exp} outside +-2^20")
        self.mant = mant
        self.exp = exp

    # construction -----------------------------------------------------------
    @classmethod
    def from_fraction(cls, q: Fraction) -> "Dyadic":
        den = q.denominator
        if den & (den - 1):
            raise NotDyadic(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    @classmethod
    def from_json(cls, obj) -> "Dyadic":
        if isinstance(obj, dict):
            return cls(int(obj["mant"]), int(obj["exp"]))
        return as_dyadic(obj)

    def to_json(self) -> dict:
        return {"mant": str(self.mant), "exp": self.exp}

    # conversion -------------------------------------------------------------
    def to_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.mant << self.exp)
        return Fraction(self.mant, 1 << -self.exp)

    def __float__(self) -> float:
        return math.ldexp(float(self.mant), self.exp) if self.mant.bit_length() < 1000 else float(self.to_fraction())

    def is_zero(self) -> bool:
        return self.mant == 0

    def sign(self) -> int:
        return (self.mant > 0) - (self.mant < 0)

    def is_integer(self) -> bool:
        return self.exp >= 0

    def scale2(self, j: int) -> "Dyadic":
        """Return ``self * 2**j`` exactly."""
        if self.mant == 0:
            return self
        return Dyadic(self.mant, self.exp + j)

    def floor(self) -> int:
        if self.exp >= 0:
            return self.mant << self.exp
        return self.mant >> -self.exp

    def ceil(self) -> int:
        if self.exp >= 0:
            return self.mant << self.exp
        return -((-self.mant) >> -self.exp)

    def frac(self) -> "Dyadic":
        """Fractional part in ``[0, 1)``."""
        return self - Dyadic(self.floor())

    # arithmetic -------------------------------------------------------------
    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mant, self.exp)

    def __abs__(self) -> "Dyadic":
        return self if self.mant >= 0 else Dyadic(-self.mant, self.exp)

    def __pos__(self) -> "Dyadic":
        return self

    def __add__(self, other) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.mant == 0:
            return other
        if other.mant == 0:
            return self
        e = min(self.exp, other.exp)
        return Dyadic((self.mant << (self.exp - e)) + (other.mant << (other.exp - e)), e)

    __radd__ = __add__

    def __sub__(self, other) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.mant * other.mant, self.exp + other.exp)

    __rmul__ = __mul__

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare Dyadic with {type(other).__name__}")
        if self.mant == 0 or other.mant == 0 or (self.mant > 0) != (other.mant > 0):
            return (self.sign() > other.sign()) - (self.sign() < other.sign())
        e = min(self.exp, other.exp)
        a = self.mant << (self.exp - e)
        b = other.mant << (other.exp - e)
        return (a > b) - (a < b)

    def __eq__(self, other) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.mant == o.mant and self.exp == o.exp

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __repr__(self) -> str:
        return f"Dyadic({self})"

    def __str__(self) -> str:
        if self.exp >= 0:
            return str(self.mant << self.exp)
        return f"{self.mant}/2^{-self.exp}"


def _coerce(x):
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x)
    if isinstance(x, Fraction):
        return Dyadic.from_fraction(x)
    return NotImplemented


DyadicLike = Union[Dyadic, int, Fraction, str]

_POW2_LITERAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*2\s*(?:\^|\*\*)\s*(\d+)\s*$")


def normalize(mant: int, exp: int) -> Dyadic:
    """Canonical Dyadic with value ``mant * 2**exp``."""
    return Dyadic(mant, exp)


def pow2(e: int) -> Dyadic:
    return Dyadic(1, e)


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``p/2^q``, ``p/q`` with ``q`` a power of two, an integer, or an
    exact decimal such as ``0.375``.  Non-dyadic values are rejected."""
    s = str(text).strip()
    m = _POW2_LITERAL.match(s)
    if m:
        return Dyadic(int(m.group(1)), -int(m.group(2)))
    try:
        q = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise NotDyadic(f"cannot parse {text!r} as a dyadic rational") from exc
    return Dyadic.from_fraction(q)


def as_dyadic(x: DyadicLike) -> Dyadic:
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, bool):
        raise NotDyadic("bool is not a dyadic rational")
    if isinstance(x, int):
        return Dyadic(x)
    if isinstance(x, Fraction):
        return Dyadic.from_fraction(x)
    if isinstance(x, str):
        return parse_dyadic(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise NotDyadic(f"{x} is not finite")
        return Dyadic.from_fraction(Fraction(x))
    raise NotDyadic(f"cannot convert {type(x).__name__} to Dyadic")


def exponent_locate(x: Dyadic) -> int:
    """The unique ``e`` with ``2**(e-1) < x <= 2**e``."""
    if x.mant <= 0:
        raise NonPositive(f"exponent_locate needs x > 0, got {x}")
    return x.exp + (x.mant - 1).bit_length()


def cell_locate(x: Dyadic, k: int) -> int:
    """The unique ``m`` with ``x`` in ``(2**k m, 2**k (m+1)]``."""
    return x.scale2(-k).ceil() - 1


def unit_cell(x: Dyadic) -> int:
    """The unique ``n`` with ``x`` in ``(n, n+1]``."""
    return x.ceil() - 1


class EmptyInterval:
    """The empty set; result of intersecting disjoint half-open intervals."""

    __slots__ = ()

    def __bool__(self) -> bool:
        return False

    def length(self) -> Dyadic:
        return Dyadic(0)

    def contains(self, x) -> bool:
        return False

    def intersect(self, other) -> "EmptyInterval":
        return self

    def scale2(self, j: int) -> "EmptyInterval":
        return self

    def __eq__(self, other) -> bool:
        return isinstance(other, EmptyInterval)

    def __hash__(self) -> int:
        return 0

    def __repr__(self) -> str:
        return "EMPTY"

    def to_json(self):
        return None


EMPTY = EmptyInterval()


class DyadicInterval:
    """Half-open interval ``(lo, hi]`` with dyadic endpoints and ``lo < hi``."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: DyadicLike, hi: DyadicLike):
        lo = as_dyadic(lo)
        hi = as_dyadic(hi)
        if not lo < hi:
            raise DyadicError(f"interval needs lo < hi, got ({lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def make(cls, lo: DyadicLike, hi: DyadicLike):
        """Like the constructor but returns ``EMPTY`` when ``lo >= hi``."""
        lo = as_dyadic(lo)
        hi = as_dyadic(hi)
        if lo < hi:
            return cls(lo, hi)
        return EMPTY

    def __bool__(self) -> bool:
        return True

    def contains(self, x: Dyadic) -> bool:
        return self.lo < x and x <= self.hi

    def length(self) -> Dyadic:
        return self.hi - self.lo

    def intersect(self, other):
        return interval_intersect(self, other)

    def scale2(self, j: int) -> "DyadicInterval":
        return DyadicInterval(self.lo.scale2(j), self.hi.scale2(j))

    def negate(self) -> "DyadicInterval":
        """The reflected set ``{-x : x in (lo, hi]}`` as a half-open interval.

        Reflection turns ``(lo, hi]`` into ``[-hi, -lo)``; the half-open
        convention is kept by using ``(-hi, -lo]``, which differs on a
        measure-zero set only.
        """
        return DyadicInterval(-self.hi, -self.lo)

    def __eq__(self, other) -> bool:
        return isinstance(other, DyadicInterval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"({self.lo}, {self.hi}]"

    def to_json(self) -> dict:
        return {"lo": self.lo.to_json(), "hi": self.hi.to_json()}

    @classmethod
    def from_json(cls, obj) -> "DyadicInterval":
        return cls(Dyadic.from_json(obj["lo"]), Dyadic.from_json(obj["hi"]))


def interval_intersect(a, b):
    """Exact intersection of two half-open intervals (or ``EMPTY``)."""
    if not a or not b:
        return EMPTY
    lo = a.lo if a.lo >= b.lo else b.lo
    hi = a.hi if a.hi <= b.hi else b.hi
    if lo < hi:
        return DyadicInterval(lo, hi)
    return EMPTY
