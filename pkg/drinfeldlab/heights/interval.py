"""Exact rational intervals with a certified-exact flag."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Union

from drinfeldlab.utils.errors import DomainError

Rational = Union[int, Fraction]


def format_rational(x: Rational) -> str:
    """"a/b", or "a" for integers."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: Union[str, int]) -> Fraction:
    return Fraction(text) if isinstance(text, int) else Fraction(text.strip())


@dataclass(frozen=True)
class HeightInterval:
    lo: Fraction
    hi: Fraction
    exact: bool = False

    def __post_init__(self) -> None:
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        # a degenerate interval is an exact value
        object.__setattr__(self, "exact", self.exact or lo == hi)
        if self.exact and lo != hi:
            raise DomainError("an exact interval must have lo == hi")

    @classmethod
    def point(cls, x: Rational) -> "HeightInterval":
        return cls(Fraction(x), Fraction(x), True)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other: Union["HeightInterval", Rational]) -> "HeightInterval":
        if isinstance(other, HeightInterval):
            return HeightInterval(self.lo + other.lo, self.hi + other.hi, self.exact and other.exact)
        return HeightInterval(self.lo + other, self.hi + other, self.exact)

    __radd__ = __add__

    def __sub__(self, other: Rational) -> "HeightInterval":
        return self + (-Fraction(other))

    def scale(self, factor: Rational) -> "HeightInterval":
        factor = Fraction(factor)
        if factor < 0:
            return HeightInterval(self.hi * factor, self.lo * factor, self.exact)
        return HeightInterval(self.lo * factor, self.hi * factor, self.exact)

    def contains(self, x: Rational) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: "HeightInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "HeightInterval") -> "HeightInterval":
        if not self.intersects(other):
            raise DomainError("disjoint intervals")
        return HeightInterval(max(self.lo, other.lo), min(self.hi, other.hi), self.exact or other.exact)

    def clamp_nonnegative(self) -> "HeightInterval":
        if self.hi < 0:
            raise DomainError(f"interval {self} lies below 0")
        return HeightInterval(max(self.lo, Fraction(0)), self.hi, self.exact)

    def to_dict(self) -> Dict[str, object]:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi), "exact": self.exact}

    def __str__(self) -> str:
        if self.exact:
            return format_rational(self.lo)
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"
