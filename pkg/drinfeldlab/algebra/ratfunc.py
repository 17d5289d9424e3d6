"""Rational functions and function-field domains.

`RatFunc` is a canonical fraction num/den of `UPoly`s: den monic, gcd 1.
`FunctionField(base, var)` is the domain of rational functions in `var` over
`base`; it is itself a coefficient domain, so `FunctionField(FunctionField(F_q,
"T"), "u")` is the tower F_q(T)(u) with no extra code.

Arithmetic uses the usual gcd-saving formulas (Henrici): coprime denominators
skip the final gcd, and polynomial operands skip gcds entirely.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Optional, Sequence, Tuple

from drinfeldlab.algebra.upoly import UPoly, upoly_gcd
from drinfeldlab.utils.errors import DivisionByZeroError, FieldMismatchError


@dataclass(frozen=True)
class RatFunc:
    num: UPoly
    den: UPoly

    @classmethod
    def make(cls, num: UPoly, den: UPoly) -> "RatFunc":
        """Canonicalize an arbitrary fraction."""
        num._same(den)
        if den.is_zero():
            raise DivisionByZeroError("rational function with zero denominator")
        if num.is_zero():
            return cls(num, UPoly.one(num.domain, num.var))
        if not den.is_constant():
            g = upoly_gcd(num, den)
            if not g.is_one():
                num, den = num // g, den // g
        lc = den.leading
        if lc != den.domain.one:
            inv = den.domain.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        return cls(num, den)

    @classmethod
    def from_poly(cls, num: UPoly) -> "RatFunc":
        return cls(num, UPoly.one(num.domain, num.var))

    # -- accessors --------------------------------------------------------------------
    @property
    def domain(self) -> Any:
        return self.num.domain

    @property
    def var(self) -> str:
        return self.num.var

    @property
    def field(self) -> "FunctionField":
        return function_field(self.num.domain, self.num.var)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def height(self) -> int:
        """max(deg num, deg den); 0 for the zero function."""
        if self.num.is_zero():
            return 0
        return max(self.num.degree, self.den.degree)

    def key(self) -> Tuple[Any, ...]:
        return (self.height(), self.den.key(), self.num.key())

    def _same(self, other: "RatFunc") -> None:
        if not isinstance(other, RatFunc):
            raise FieldMismatchError(f"expected a rational function, got {type(other).__name__}")
        self.num._same(other.num)

    # -- arithmetic ---------------------------------------------------------------------
    def __add__(self, other: "RatFunc") -> "RatFunc":
        self._same(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_one() and d.is_one():
            return RatFunc(a + c, b)
        if b.is_one():
            return RatFunc(a * d + c, d)
        if d.is_one():
            return RatFunc(a + c * b, b)
        g = upoly_gcd(b, d)
        if g.is_one():
            return RatFunc(a * d + c * b, b * d)
        b1, d1 = b // g, d // g
        t = a * d1 + c * b1
        if t.is_zero():
            return RatFunc(t, UPoly.one(t.domain, t.var))
        h = upoly_gcd(t, g)
        if h.is_one():
            return RatFunc(t, b1 * d)
        return RatFunc(t // h, b1 * (d // h))

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        self._same(other)
        if self.num.is_zero():
            return self
        if other.num.is_zero():
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_one() and d.is_one():
            return RatFunc(a * c, b)
        g1 = upoly_gcd(a, d) if not d.is_one() else d
        g2 = upoly_gcd(c, b) if not b.is_one() else b
        if not g1.is_one():
            a, d = a // g1, d // g1
        if not g2.is_one():
            c, b = c // g2, b // g2
        num, den = a * c, b * d
        lc = den.leading
        if lc != den.domain.one:
            inv = den.domain.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc(num, den)

    def scale(self, c: Any) -> "RatFunc":
        """Multiply by a raw constant of the coefficient domain."""
        return RatFunc(self.num.scale(c), self.den)

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise DivisionByZeroError("inverse of the zero rational function")
        num, den = self.den, self.num
        lc = den.leading
        if lc != den.domain.one:
            inv = den.domain.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc(num, den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        return self * other.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        # powers of coprime parts stay coprime
        num, den = self.num ** n, self.den ** n
        return RatFunc(num, den)

    def frob(self) -> "RatFunc":
        """Exact q-th power."""
        return RatFunc(self.num.frob(), self.den.frob())

    def frob_n(self, n: int) -> "RatFunc":
        x = self
        for _ in range(n):
            x = x.frob()
        return x

    def __repr__(self) -> str:
        if self.den.is_one():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


@dataclass(frozen=True)
class FunctionField:
    """The rational function field base(var), usable as a coefficient domain."""
    base: Any
    var: str = "T"

    is_finite = False

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def p(self) -> int:
        return self.base.p

    @cached_property
    def zero(self) -> RatFunc:
        return RatFunc(UPoly.zero(self.base, self.var), UPoly.one(self.base, self.var))

    @cached_property
    def one(self) -> RatFunc:
        one = UPoly.one(self.base, self.var)
        return RatFunc(one, one)

    def __repr__(self) -> str:
        return f"{self.base!r}({self.var})"

    # -- element builders -------------------------------------------------------------
    def gen(self) -> RatFunc:
        return RatFunc.from_poly(UPoly.gen(self.base, self.var))

    def const(self, c: Any) -> RatFunc:
        """Embed a raw value of the base domain."""
        return RatFunc.from_poly(UPoly.constant(self.base, c, self.var))

    def from_int(self, n: int) -> RatFunc:
        return self.const(self.base.from_int(n))

    def poly(self, coeffs: Sequence[Any]) -> UPoly:
        return UPoly(self.base, tuple(coeffs), self.var)

    def element(self, num: Sequence[Any], den: Optional[Sequence[Any]] = None) -> RatFunc:
        n = self.poly(num)
        if den is None:
            return RatFunc.from_poly(n)
        return RatFunc.make(n, self.poly(den))

    def __call__(self, num: Sequence[Any], den: Optional[Sequence[Any]] = None) -> RatFunc:
        return self.element(num, den)

    def random_element(self, rng: random.Random, max_degree: int = 1, nonzero: bool = False) -> RatFunc:
        """Uniform-ish random element with numerator/denominator degree <= max_degree."""
        while True:
            num = self.poly([self.base.random_element(rng) for _ in range(max_degree + 1)])
            den_coeffs = [self.base.random_element(rng) for _ in range(rng.randint(0, max_degree))]
            den = self.poly(den_coeffs + [self.base.one])
            if nonzero and num.is_zero():
                continue
            return RatFunc.make(num, den)

    def random_poly(self, rng: random.Random, max_degree: int) -> UPoly:
        return self.poly([self.base.random_element(rng) for _ in range(max_degree + 1)])

    # -- domain protocol --------------------------------------------------------------
    def is_zero(self, a: RatFunc) -> bool:
        return a.num.is_zero()

    def add(self, a: RatFunc, b: RatFunc) -> RatFunc:
        return a + b

    def sub(self, a: RatFunc, b: RatFunc) -> RatFunc:
        return a - b

    def neg(self, a: RatFunc) -> RatFunc:
        return -a

    def mul(self, a: RatFunc, b: RatFunc) -> RatFunc:
        return a * b

    def inv(self, a: RatFunc) -> RatFunc:
        return a.inverse()

    def div(self, a: RatFunc, b: RatFunc) -> RatFunc:
        return a / b

    def pow(self, a: RatFunc, n: int) -> RatFunc:
        return a ** n

    def frob(self, a: RatFunc) -> RatFunc:
        return a.frob()

    def key(self, a: RatFunc) -> Tuple[Any, ...]:
        return a.key()


_FIELDS: dict = {}


def function_field(base: Any, var: str = "T") -> FunctionField:
    """Shared `FunctionField` instance (keeps cached zero/one around)."""
    key = (base, var)
    fld = _FIELDS.get(key)
    if fld is None:
        fld = FunctionField(base, var)
        _FIELDS[key] = fld
    return fld
