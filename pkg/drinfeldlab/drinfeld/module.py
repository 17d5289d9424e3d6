"""Drinfeld F_q[T]-modules, their action, isomorphisms and j-invariants.

A module of rank r is fixed by phi_T(x) = T x + a_1 x^q + ... + a_r x^(q^r).
Conjugation by alpha gives the isomorphic module psi with
alpha psi_T(x) = phi_T(alpha x), i.e. b_j = alpha^(q^j - 1) a_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from drinfeldlab.algebra.factor import upoly_factor
from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.drinfeld.skew import SkewPoly, skew_mul
from drinfeldlab.fields.places import FieldDescriptor, Place, sort_places
from drinfeldlab.utils.errors import DomainError, FieldMismatchError, UnsupportedFieldError


@dataclass(frozen=True)
class DrinfeldModule:
    """phi_T = T x + sum a_j x^(q^j); `coeffs` holds a_1..a_r.

    `places_hint` lists places outside of which every a_j is a unit; it is
    only needed over the tower, where supports cannot be computed.
    """
    descriptor: FieldDescriptor
    coeffs: Tuple[RatFunc, ...]
    places_hint: Tuple[Place, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.coeffs or self.coeffs[-1].is_zero():
            raise DomainError("leading coefficient a_r must be nonzero")
        fld = self.descriptor.field
        for c in self.coeffs:
            if c.field != fld:
                raise FieldMismatchError(f"coefficient {c!r} is not in {fld!r}")

    @classmethod
    def carlitz(cls, descriptor: FieldDescriptor) -> "DrinfeldModule":
        return cls(descriptor, (descriptor.field.one,))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    @property
    def q(self) -> int:
        return self.descriptor.q

    @property
    def field(self):
        return self.descriptor.field

    @property
    def leading(self) -> RatFunc:
        return self.coeffs[-1]

    def twisted_coeffs(self) -> Tuple[RatFunc, ...]:
        """(a_0, a_1, ..., a_r) with a_0 = T."""
        return (self.descriptor.T,) + self.coeffs

    @property
    def phi_T(self) -> SkewPoly:
        return SkewPoly(self.field, self.twisted_coeffs())

    def __call__(self, x: RatFunc) -> RatFunc:
        """phi_T(x)."""
        return self.phi_T(x)

    def weights(self) -> Tuple[int, ...]:
        return tuple(self.q ** j - 1 for j in range(1, self.rank + 1))

    def to_dict(self) -> Dict[str, object]:
        from drinfeldlab.lab.codec import encode_module

        return encode_module(self)


def phi_a(M: DrinfeldModule, a: UPoly) -> SkewPoly:
    """phi_a by Horner: phi_(a T + c) = phi_a o phi_T + c."""
    if a.domain != M.descriptor.fq:
        raise FieldMismatchError("a must lie in F_q[T]")
    fld = M.field
    phi_t = M.phi_T
    result = SkewPoly.zero(fld)
    for c in reversed(a.coeffs):
        result = skew_mul(result, phi_t)
        if c:
            result = result + SkewPoly.constant(fld, M.descriptor.embed_fq(c))
    return result


def conjugate(M: DrinfeldModule, alpha: RatFunc, alpha_places: Sequence[Place] = ()) -> DrinfeldModule:
    """The module psi with alpha psi_T(x) = phi_T(alpha x)."""
    if alpha.is_zero():
        raise DomainError("cannot conjugate by 0")
    q = M.q
    coeffs = tuple(alpha ** (q ** j - 1) * a for j, a in enumerate(M.coeffs, start=1))
    hint = tuple(sort_places(list(M.places_hint) + list(alpha_places))) if M.places_hint or alpha_places else ()
    return DrinfeldModule(M.descriptor, coeffs, hint)


@dataclass(frozen=True, eq=False)
class WeightedPoint:
    """A point of weighted projective space; == is weighted-projective equality."""
    coords: Tuple[RatFunc, ...]
    weights: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != len(self.weights):
            raise DomainError("coordinate and weight lists differ in length")
        if all(c.is_zero() for c in self.coords):
            raise DomainError("the all-zero point is not in weighted projective space")

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coords) if not c.is_zero())

    def scaled(self, alpha: RatFunc) -> "WeightedPoint":
        return WeightedPoint(tuple(alpha ** w * c for c, w in zip(self.coords, self.weights)), self.weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedPoint):
            return NotImplemented
        return scaling_root(self, other) is not None

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        inner = ", ".join(f"{c!r}" for c in self.coords)
        return f"[{inner}]_{list(self.weights)}"


def _bezout(weights: Sequence[int]) -> Tuple[int, List[int]]:
    """g = gcd(weights) and integers n_i with sum n_i w_i = g."""
    g, coeffs = weights[0], [1]
    for w in weights[1:]:
        # extended Euclid on (g, w)
        r0, r1, s0, s1, t0, t1 = g, w, 1, 0, 0, 1
        while r1:
            qt = r0 // r1
            r0, r1 = r1, r0 - qt * r1
            s0, s1 = s1, s0 - qt * s1
            t0, t1 = t1, t0 - qt * t1
        coeffs = [c * s0 for c in coeffs] + [t0]
        g = r0
    return g, coeffs


def scaling_root(x: WeightedPoint, y: WeightedPoint) -> Optional[Tuple[RatFunc, int]]:
    """(beta, g) with y_k / x_k = beta^(w_k / g) for every k, or None.

    The points are equal over the algebraic closure exactly when this exists:
    any alpha with alpha^g = beta then satisfies y = alpha . x.
    """
    if x.weights != y.weights:
        raise DomainError("points live in different weighted projective spaces")
    supp = x.support()
    if supp != y.support():
        return None
    weights = [x.weights[k] for k in supp]
    ratios = [y.coords[k] / x.coords[k] for k in supp]
    g, n = _bezout(weights)
    beta = reduce(lambda acc, item: acc * item[0] ** item[1], zip(ratios, n), x.coords[supp[0]].field.one)
    for rho, w in zip(ratios, weights):
        if beta ** (w // g) != rho:
            return None
    return beta, g


def j_invariant(M: DrinfeldModule) -> WeightedPoint:
    return WeightedPoint(M.coeffs, M.weights())


def classical_j(M: DrinfeldModule) -> RatFunc:
    """g^(q+1) / Delta for rank 2."""
    if M.rank != 2:
        raise DomainError("the classical j-invariant is defined for rank 2")
    g, delta = M.coeffs
    return g ** (M.q + 1) / delta


def _nth_root_fq(fq, c: int, n: int) -> Optional[int]:
    for a in fq.elements():
        if fq.pow(a, n) == c:
            return a
    return None


def nth_root(x: RatFunc, n: int) -> Optional[RatFunc]:
    """An n-th root of x in F_q(T), or None (n prime to p)."""
    if x.is_zero():
        return x
    if n == 1:
        return x
    fq = x.domain
    if not getattr(fq, "is_finite", False):
        raise UnsupportedFieldError("roots over the tower need factored input")
    fld = x.field
    root = fld.one
    for poly in (x.num, x.den):
        sign = 1 if poly is x.num else -1
        if poly.degree < 1:
            continue
        for P, e in upoly_factor(poly):
            if e % n:
                return None
            root = root * RatFunc.from_poly(P) ** (sign * (e // n))
    unit = _nth_root_fq(fq, x.num.leading, n)
    if unit is None:
        return None
    return root.scale(unit)


def l_isomorphism(M: DrinfeldModule, N: DrinfeldModule) -> Optional[RatFunc]:
    """alpha in L with conjugate(M, alpha) = N, or None."""
    if M.descriptor != N.descriptor or M.rank != N.rank:
        return None
    found = scaling_root(j_invariant(M), j_invariant(N))
    if found is None:
        return None
    beta, g = found
    alpha = nth_root(beta, g)
    if alpha is None:
        return None
    # alpha^g = beta fixes alpha up to a g-th root of unity; all of them work
    if conjugate(M, alpha).coeffs != N.coeffs:  # pragma: no cover - guarded by the criterion
        return None
    return alpha


def is_l_isomorphic(M: DrinfeldModule, N: DrinfeldModule) -> bool:
    return l_isomorphism(M, N) is not None
