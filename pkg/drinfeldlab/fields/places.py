"""Places, valuations and absolute values.

Two ground fields are supported:

- base rational: L = F_q(T). Places are the monic irreducibles P(T) plus the
  place at infinity; T is non-integral only at infinity.
- tower: L' = F(u) with F = F_q(T). Places are monic irreducibles in u over F
  plus infinity in u. Elements of F (T included) are units everywhere, so
  every place is "finite" in the sense used for Drinfeld modules.

Absolute values are normalized so log q = 1: log|x|_v = -v(x) * deg(v).
Heights and local invariants are `Fraction`s; nothing here uses floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from drinfeldlab.algebra.factor import is_irreducible, upoly_factor
from drinfeldlab.algebra.fq import FqConfig, finite_field
from drinfeldlab.algebra.ratfunc import FunctionField, RatFunc, function_field
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.utils.errors import DomainError, UnsupportedFieldError

BASE = "base"
TOWER = "tower"


@dataclass(frozen=True)
class Place:
    kind: str
    poly: Optional[UPoly] = None

    @classmethod
    def finite(cls, poly: UPoly, check: bool = True) -> "Place":
        if poly.degree < 1 or not poly.is_monic():
            raise DomainError(f"place polynomial {poly!r} must be monic of positive degree")
        if check and getattr(poly.domain, "is_finite", False) and not is_irreducible(poly):
            raise DomainError(f"place polynomial {poly!r} is reducible")
        return cls("finite", poly)

    @classmethod
    def infinity(cls) -> "Place":
        return INFINITY

    @property
    def is_infinity(self) -> bool:
        return self.kind == "infinity"

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else self.poly.degree

    def key(self) -> Tuple[Any, ...]:
        return (0,) if self.poly is None else (1, self.poly.key())

    def __repr__(self) -> str:
        return "inf" if self.poly is None else f"({self.poly!r})"


INFINITY = Place("infinity")


def sort_places(places: Iterable[Place]) -> List[Place]:
    return sorted(set(places), key=lambda v: v.key())


@dataclass(frozen=True)
class FactoredRatFunc:
    """unit * prod P^e, for elements whose factorization is known a priori.

    `unit` must be constant in the field variable.
    """
    unit: RatFunc
    factors: Tuple[Tuple[UPoly, int], ...] = ()

    @cached_property
    def value(self) -> RatFunc:
        num = self.unit.num
        den = self.unit.den
        for poly, e in self.factors:
            if e > 0:
                num = num * poly ** e
            elif e < 0:
                den = den * poly ** (-e)
        return RatFunc.make(num, den)

    def places(self) -> List[Place]:
        out = [Place.finite(P, check=False) for P, e in self.factors if e]
        if sum(e * P.degree for P, e in self.factors) != 0:
            out.append(INFINITY)
        return sort_places(out)


Element = Union[RatFunc, FactoredRatFunc]


def _value(x: Element) -> RatFunc:
    return x.value if isinstance(x, FactoredRatFunc) else x


def _ord(f: UPoly, P: UPoly) -> int:
    n = 0
    while f.degree >= P.degree:
        quo, rem = divmod(f, P)
        if not rem.is_zero():
            break
        f = quo
        n += 1
    return n


def valuation(x: Element, v: Place) -> Union[int, float]:
    """Normalized valuation; math.inf for x = 0."""
    if isinstance(x, FactoredRatFunc) and not v.is_infinity:
        for P, e in x.factors:
            if P == v.poly:
                return e
        return 0
    x = _value(x)
    if x.is_zero():
        return math.inf
    if v.is_infinity:
        return x.den.degree - x.num.degree
    return _ord(x.num, v.poly) - _ord(x.den, v.poly)


def log_abs(x: Element, v: Place) -> Fraction:
    """log|x|_v = -v(x) deg(v)."""
    val = valuation(x, v)
    if val == math.inf:
        raise DomainError("log|0| is undefined")
    return Fraction(-val * v.degree)


def log_plus(x: Element, v: Place) -> Fraction:
    """log+|x|_v, with log+|0| = 0."""
    if _value(x).is_zero():
        return Fraction(0)
    return max(Fraction(0), log_abs(x, v))


def support(x: Element, places_hint: Optional[Sequence[Place]] = None) -> List[Place]:
    """Places where x has nonzero valuation, sorted.

    Over F_q(T) this factors x. Over the tower, x must be a `FactoredRatFunc`
    or a `places_hint` listing every candidate place must be given.
    """
    if isinstance(x, FactoredRatFunc):
        return x.places()
    if x.is_zero():
        raise DomainError("support of 0 is undefined")
    if x.is_constant():
        return []
    if getattr(x.domain, "is_finite", False):
        out: List[Place] = []
        for poly in (x.num, x.den):
            if poly.degree > 0:
                out.extend(Place.finite(P, check=False) for P, _ in upoly_factor(poly))
        if x.num.degree != x.den.degree:
            out.append(INFINITY)
        return sort_places(out)
    if places_hint is None:
        raise UnsupportedFieldError("support over the tower needs factored input")
    out = [v for v in places_hint if valuation(x, v) != 0]
    if x.num.degree != x.den.degree:
        out.append(INFINITY)
    return sort_places(out)


@dataclass(frozen=True)
class FieldDescriptor:
    """Which ground field we work over, and where T lands in it."""
    instance: str
    config: FqConfig = field(default_factory=lambda: FqConfig(2))

    @classmethod
    def base_rational(cls, config: FqConfig) -> "FieldDescriptor":
        return cls(BASE, config)

    @classmethod
    def tower(cls, config: FqConfig) -> "FieldDescriptor":
        return cls(TOWER, config)

    @property
    def q(self) -> int:
        return self.config.q

    @property
    def fq(self):
        return finite_field(self.config)

    @property
    def base_field(self) -> FunctionField:
        """F_q(T)."""
        return function_field(self.fq, "T")

    @property
    def field(self) -> FunctionField:
        """The ground field L (F_q(T) or F_q(T)(u))."""
        if self.instance == BASE:
            return self.base_field
        return function_field(self.base_field, "u")

    @property
    def T(self) -> RatFunc:
        if self.instance == BASE:
            return self.base_field.gen()
        return self.field.const(self.base_field.gen())

    @property
    def is_tower(self) -> bool:
        return self.instance == TOWER

    def is_infinite(self, v: Place) -> bool:
        """Infinite in the Drinfeld sense: T is non-integral at v."""
        return self.instance == BASE and v.is_infinity

    def embed_fq(self, c: int) -> RatFunc:
        if self.instance == BASE:
            return self.field.const(c)
        return self.field.const(self.base_field.const(c))

    def embed_base(self, x: RatFunc) -> RatFunc:
        """F_q(T) -> L."""
        if self.instance == BASE:
            return x
        return self.field.const(x)

    def uniformizer(self, v: Place) -> RatFunc:
        if v.is_infinity:
            return self.field.gen().inverse()
        return RatFunc.from_poly(v.poly)

    def a_poly(self, coeffs: Sequence[int]) -> UPoly:
        """An element of A = F_q[T]."""
        return UPoly(self.fq, tuple(coeffs), "T")

    def to_dict(self) -> Dict[str, object]:
        return {
            "instance": self.instance,
            "p": self.config.p,
            "e": self.config.e,
            "modulus": list(self.config.modulus),
        }
