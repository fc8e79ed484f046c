"""Closed binary64 intervals with outward rounding.

Python does not expose the FPU rounding mode, so every computed bound is
pushed one ulp outward after the round-to-nearest operation.  Negation is
exact and is not widened.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

_INF = math.inf


def down(x):
    return math.nextafter(x, -_INF)


def up(x):
    return math.nextafter(x, _INF)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval bound is NaN")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value):
        """Tightest interval around an exact rational (or float) value."""
        if isinstance(value, float):
            return cls(value, value)
        value = Fraction(value)
        f = float(value)
        exact = Fraction(f)
        if exact == value:
            return cls(f, f)
        if exact < value:
            return cls(f, up(f))
        return cls(down(f), f)

    @property
    def diameter(self):
        return self.hi - self.lo

    def contains(self, value):
        """Exact containment test; ``value`` may be a Fraction."""
        return Fraction(self.lo) <= value <= Fraction(self.hi)

    def contains_zero(self):
        return self.lo <= 0.0 <= self.hi

    def __add__(self, other):
        return Interval(down(self.lo + other.lo), up(self.hi + other.hi))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other):
        p = (self.lo * other.lo, self.lo * other.hi,
             self.hi * other.lo, self.hi * other.hi)
        return Interval(down(min(p)), up(max(p)))

    def reciprocal(self):
        if self.contains_zero():
            raise ZeroDivisionError("interval contains zero")
        return Interval(down(1.0 / self.hi), up(1.0 / self.lo))

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"
