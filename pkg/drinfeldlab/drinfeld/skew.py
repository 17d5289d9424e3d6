"""Additive (skew) polynomials sum c_i x^(q^i).

Composition follows the twist rule c x^(q^i) o d x^(q^j) = c d^(q^i) x^(q^(i+j)),
so the ring is the Ore ring L{tau} with tau c = c^q tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from drinfeldlab.algebra.ratfunc import FunctionField, RatFunc
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.utils.errors import FieldMismatchError


def _strip(fld: FunctionField, coeffs) -> Tuple[RatFunc, ...]:
    c = list(coeffs)
    while c and c[-1].is_zero():
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class SkewPoly:
    field: FunctionField
    coeffs: Tuple[RatFunc, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _strip(self.field, self.coeffs))

    @classmethod
    def identity(cls, fld: FunctionField) -> "SkewPoly":
        return cls(fld, (fld.one,))

    @classmethod
    def zero(cls, fld: FunctionField) -> "SkewPoly":
        return cls(fld, ())

    @classmethod
    def constant(cls, fld: FunctionField, c: RatFunc) -> "SkewPoly":
        return cls(fld, (c,))

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def degree(self) -> int:
        """Skew degree n, so the x-degree is q^n; -1 for the zero map."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _same(self, other: "SkewPoly") -> None:
        if not isinstance(other, SkewPoly) or other.field != self.field:
            raise FieldMismatchError("skew polynomials over different fields")

    def __add__(self, other: "SkewPoly") -> "SkewPoly":
        self._same(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return SkewPoly(self.field, tuple(out))

    def __neg__(self) -> "SkewPoly":
        return SkewPoly(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "SkewPoly") -> "SkewPoly":
        return self + (-other)

    def scale(self, c: RatFunc) -> "SkewPoly":
        """c * f, i.e. (c x) o f."""
        return SkewPoly(self.field, tuple(c * a for a in self.coeffs))

    def __call__(self, x: RatFunc) -> RatFunc:
        """Evaluate at x; powers x^(q^i) come from repeated exact Frobenius."""
        acc = self.field.zero
        power = x
        for i, c in enumerate(self.coeffs):
            if i:
                power = power.frob()
            if not c.is_zero():
                acc = acc + c * power
        return acc

    def as_poly(self, var: str = "x") -> UPoly:
        """The ordinary polynomial in x this map is."""
        q = self.q
        if not self.coeffs:
            return UPoly(self.field, (), var)
        out: List[RatFunc] = [self.field.zero] * (q ** self.degree + 1)
        for i, c in enumerate(self.coeffs):
            out[q ** i] = c
        return UPoly(self.field, tuple(out), var)

    def __repr__(self) -> str:
        terms = [f"({c!r})*x^{self.q ** i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(terms) or "0"


def skew_mul(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """Composition f o g."""
    f._same(g)
    if f.is_zero() or g.is_zero():
        return SkewPoly.zero(f.field)
    fld = f.field
    out: List[RatFunc] = [fld.zero] * (len(f.coeffs) + len(g.coeffs) - 1)
    twisted = list(g.coeffs)
    for i, c in enumerate(f.coeffs):
        if i:
            twisted = [d.frob() for d in twisted]
        if c.is_zero():
            continue
        for j, d in enumerate(twisted):
            if not d.is_zero():
                out[i + j] = out[i + j] + c * d
    return SkewPoly(fld, tuple(out))
