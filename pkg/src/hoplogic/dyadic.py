"""Exact dyadic rationals (``numerator / 2**exponent``).

Every coefficient produced from a definite clause, and every Hebbian increment
with a power-of-two learning rate, is dyadic, so weights can be compared
bit-exactly without floating point.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union["DyadicRational", int, Fraction]


class DyadicRational:
    """A rational number whose denominator is a power of two.

    Stored canonically: when ``exponent > 0`` the numerator is odd; zero is
    always ``0 / 2**0``.
    """

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            # strip common factors of two
            tz = (numerator & -numerator).bit_length() - 1
            shift = min(tz, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    @classmethod
    def coerce(cls, value: Number) -> "DyadicRational":
        if isinstance(value, DyadicRational):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Rational):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not dyadic")
            return cls(value.numerator, den.bit_length() - 1)
        raise TypeError(f"cannot convert {type(value).__name__} to DyadicRational")

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        """Parse ``"n/d"`` (``d`` a power of two) or a bare integer."""
        text = text.strip()
        num, sep, den = text.partition("/")
        try:
            d = int(den) if sep else 1
            n = int(num)
        except ValueError:
            raise ValueError(f"malformed rational {text!r}") from None
        if d <= 0 or d & (d - 1):
            raise ValueError(f"denominator of {text!r} is not a power of two")
        return cls(n, d.bit_length() - 1)

    @property
    def denominator(self) -> int:
        return 1 << self.exponent

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def scaled_int(self, exponent: int) -> int:
        """Return the integer ``self * 2**exponent``; must be exact."""
        if exponent < self.exponent:
            raise ValueError("scaling would lose precision")
        return self.numerator << (exponent - self.exponent)

    def halve(self, times: int = 1) -> "DyadicRational":
        return DyadicRational(self.numerator, self.exponent + times)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        e = max(self.exponent, o.exponent)
        return DyadicRational(
            (self.numerator << (e - self.exponent)) + (o.numerator << (e - o.exponent)), e
        )

    __radd__ = __add__

    def __neg__(self) -> "DyadicRational":
        return DyadicRational(-self.numerator, self.exponent)

    def __pos__(self) -> "DyadicRational":
        return self

    def __abs__(self) -> "DyadicRational":
        return DyadicRational(abs(self.numerator), self.exponent)

    def __sub__(self, other):
        try:
            o = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return DyadicRational(self.numerator * o.numerator, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # Division leaves the dyadic ring in general; fall back to Fraction.
        return self.as_fraction() / other

    # comparison -----------------------------------------------------------
    def _cmp_key(self, other):
        if isinstance(other, DyadicRational):
            return self.as_fraction(), other.as_fraction()
        if isinstance(other, (int, Rational)):
            return self.as_fraction(), other
        if isinstance(other, float):
            return float(self), other
        return None

    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return self.numerator == other.numerator and self.exponent == other.exponent
        pair = self._cmp_key(other)
        return NotImplemented if pair is None else pair[0] == pair[1]

    def __hash__(self):
        return hash(self.as_fraction())

    def __lt__(self, other):
        pair = self._cmp_key(other)
        return NotImplemented if pair is None else pair[0] < pair[1]

    def __le__(self, other):
        pair = self._cmp_key(other)
        return NotImplemented if pair is None else pair[0] <= pair[1]

    def __gt__(self, other):
        pair = self._cmp_key(other)
        return NotImplemented if pair is None else pair[0] > pair[1]

    def __ge__(self, other):
        pair = self._cmp_key(other)
        return NotImplemented if pair is None else pair[0] >= pair[1]

    def __bool__(self) -> bool:
        return self.numerator != 0

    def __float__(self) -> float:
        return float(self.as_fraction())

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    def __repr__(self) -> str:
        return f"DyadicRational({self.numerator}, {self.exponent})"

    def __reduce__(self):
        return (DyadicRational, (self.numerator, self.exponent))


ZERO = DyadicRational(0)
ONE = DyadicRational(1)
