"""Minimal discriminants, discriminant divisors and minimal models.

Conjugating by pi^k (pi a uniformizer at v) moves v(a_j) to
v(a_j) + k (q^j - 1). The least k making every coefficient integral is
k* = ceil(max_j -v(a_j) / (q^j - 1)), and the minimal discriminant is the
resulting c_v:

    D_v = (v(a_r) + k* (q^r - 1)) deg(v) / (q^r - 1).

Over F_q(T) the finite places form a principal class group, so the local
scalings glue into one global element beta = prod P^(k*_P) and every module
has a global minimal model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Optional, Tuple

from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.drinfeld.local import c_v
from drinfeldlab.drinfeld.module import DrinfeldModule, conjugate
from drinfeldlab.fields.heights import weighted_height
from drinfeldlab.fields.places import Place, sort_places, support, valuation
from drinfeldlab.utils.errors import DomainError, PreconditionError, UnsupportedFieldError
from drinfeldlab.utils.logging import get_logger


def _require_finite_place(M: DrinfeldModule, v: Place) -> None:
    if M.descriptor.is_infinite(v):
        raise DomainError("minimal discriminants are defined at finite places only")


def min_disc_exponent(M: DrinfeldModule, v: Place) -> int:
    """k*: the least k with conjugate(M, pi_v^k) integral at v."""
    _require_finite_place(M, v)
    q = M.q
    need = max(
        Fraction(-valuation(a, v), q ** j - 1)
        for j, a in enumerate(M.coeffs, start=1)
        if not a.is_zero()
    )
    return math.ceil(need)


def local_min_disc(M: DrinfeldModule, v: Place) -> Tuple[Fraction, int]:
    """(D_v, k*) at a finite place."""
    k = min_disc_exponent(M, v)
    qr1 = M.q ** M.rank - 1
    disc = Fraction((valuation(M.leading, v) + k * qr1) * v.degree, qr1)
    return disc, k


def is_integral_at(M: DrinfeldModule, v: Place) -> bool:
    return all(a.is_zero() or valuation(a, v) >= 0 for a in M.coeffs)


def search_min_disc(M: DrinfeldModule, v: Place, window: int = 16) -> Tuple[Fraction, int]:
    """Brute-force k* by scanning k in [-window, window]; cross-checks the closed form."""
    _require_finite_place(M, v)
    pi = M.descriptor.uniformizer(v)
    for k in range(-window, window + 1):
        model = conjugate(M, pi ** k)
        if is_integral_at(model, v):
            return c_v(model, v), k
    raise DomainError(f"no integral model within |k| <= {window}")


def local_minimal_model(M: DrinfeldModule, v: Place) -> DrinfeldModule:
    _, k = local_min_disc(M, v)
    if k == 0:
        return M
    pi = M.descriptor.uniformizer(v)
    return conjugate(M, pi ** k, alpha_places=[v])


def d_constant(q: int, r: int) -> int:
    """lcm{q^j - 1 : 1 <= j <= r}."""
    if r < 1:
        raise DomainError("rank must be positive")
    return reduce(lambda a, b: a * b // math.gcd(a, b), (q ** j - 1 for j in range(1, r + 1)), 1)


@dataclass(frozen=True)
class DiscDivisor:
    """Finitely supported divisor with rational coefficients.

    Coefficients already carry their deg(v) factor, so `degree` is the plain sum.
    """
    terms: Tuple[Tuple[Place, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Dict[Place, Fraction]) -> "DiscDivisor":
        items = [(v, Fraction(c)) for v, c in coeffs.items() if c != 0]
        return cls(tuple(sorted(items, key=lambda item: item[0].key())))

    def as_dict(self) -> Dict[Place, Fraction]:
        return dict(self.terms)

    def __getitem__(self, v: Place) -> Fraction:
        return self.as_dict().get(v, Fraction(0))

    @property
    def degree(self) -> Fraction:
        return sum((c for _, c in self.terms), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DiscDivisor") -> "DiscDivisor":
        acc = self.as_dict()
        for v, c in other.terms:
            acc[v] = acc.get(v, Fraction(0)) + c
        return DiscDivisor.from_dict(acc)

    def __sub__(self, other: "DiscDivisor") -> "DiscDivisor":
        return self + DiscDivisor(tuple((v, -c) for v, c in other.terms))

    def to_dict(self) -> List[Dict[str, object]]:
        from drinfeldlab.lab.codec import encode_divisor

        return encode_divisor(self)


def coefficient_places(M: DrinfeldModule) -> List[Place]:
    """Places where some a_j is not a unit (hint-based over the tower)."""
    hint = list(M.places_hint) or None
    out: List[Place] = []
    for a in M.coeffs:
        if not a.is_zero() and not a.is_constant():
            out.extend(support(a, places_hint=hint))
    return sort_places(out)


def finite_coefficient_places(M: DrinfeldModule) -> List[Place]:
    return [v for v in coefficient_places(M) if not M.descriptor.is_infinite(v)]


def divisor_of(M: DrinfeldModule, x: RatFunc, places: Iterable[Place]) -> DiscDivisor:
    """(x)_fin restricted to `places`."""
    return DiscDivisor.from_dict({v: Fraction(valuation(x, v) * v.degree) for v in places})


def global_divisors(M: DrinfeldModule) -> Tuple[DiscDivisor, DiscDivisor, DiscDivisor]:
    """(discriminant, minimal discriminant, Weierstrass divisor) of an integral model.

    Coefficient-wise disc = min_disc + weierstrass, the Weierstrass coefficient
    at v being -k*_v deg(v).
    """
    disc: Dict[Place, Fraction] = {}
    minimal: Dict[Place, Fraction] = {}
    weier: Dict[Place, Fraction] = {}
    for v in finite_coefficient_places(M):
        if not is_integral_at(M, v):
            raise PreconditionError(f"module is not integral at {v!r}", place=v)
        d, k = local_min_disc(M, v)
        disc[v] = c_v(M, v)
        minimal[v] = d
        weier[v] = Fraction(-k * v.degree)
    return DiscDivisor.from_dict(disc), DiscDivisor.from_dict(minimal), DiscDivisor.from_dict(weier)


def minimal_discriminant(M: DrinfeldModule) -> DiscDivisor:
    """D_{phi/L}; defined for any model since D_v is an isomorphism invariant."""
    return DiscDivisor.from_dict({v: local_min_disc(M, v)[0] for v in finite_coefficient_places(M)})


@dataclass(frozen=True)
class MinimalityCertificate:
    k_star: Tuple[Tuple[Place, int], ...]
    beta: RatFunc
    model: DrinfeldModule

    def validate(self) -> bool:
        """Every k* of the output model is 0 and the model is integral."""
        return all(
            local_min_disc(self.model, v)[1] == 0 and is_integral_at(self.model, v)
            for v in finite_coefficient_places(self.model)
        )

    def to_dict(self) -> Dict[str, object]:
        from drinfeldlab.lab.codec import encode_place, encode_ratfunc

        return {
            "kStar": [{"place": encode_place(v), "k": k} for v, k in self.k_star],
            "beta": encode_ratfunc(self.beta),
            "model": self.model.to_dict(),
        }


def minimal_global_model(M: DrinfeldModule) -> Tuple[DrinfeldModule, MinimalityCertificate]:
    """conjugate(M, beta) with beta = prod pi_v^(k*_v); minimal at every finite place."""
    beta = M.field.one
    ks: List[Tuple[Place, int]] = []
    for v in finite_coefficient_places(M):
        _, k = local_min_disc(M, v)
        if k:
            ks.append((v, k))
            beta = beta * M.descriptor.uniformizer(v) ** k
    model = conjugate(M, beta, alpha_places=[v for v, _ in ks]) if ks else M
    get_logger().debug("minimal model: scaled at %d place(s)", len(ks))
    return model, MinimalityCertificate(tuple(ks), beta, model)


@dataclass
class LowerNorthcottReport:
    conclusive: bool
    h_phi: Fraction
    bound: Fraction
    h_j: Fraction
    deg_min_disc: Fraction
    model: Optional[DrinfeldModule] = None
    beta: Optional[RatFunc] = None
    scanned: int = 0

    @property
    def slack(self) -> Fraction:
        return self.bound - self.h_phi

    def to_dict(self) -> Dict[str, object]:
        from drinfeldlab.lab.codec import encode_ratfunc, format_rational

        return {
            "conclusive": self.conclusive,
            "hPhi": format_rational(self.h_phi),
            "bound": format_rational(self.bound),
            "slack": format_rational(self.slack),
            "hJ": format_rational(self.h_j),
            "degMinDisc": format_rational(self.deg_min_disc),
            "beta": encode_ratfunc(self.beta) if self.beta is not None else None,
            "model": self.model.to_dict() if self.model is not None else None,
            "scanned": self.scanned,
        }


def check_lowernorthcott(M: DrinfeldModule, max_degree: int = 2) -> LowerNorthcottReport:
    """Search integral models conjugate(minimal, beta), beta monic of degree <= max_degree,
    for one with h(phi) <= 2 max{h(j), deg D} (genus 0, [L:K] = 1)."""
    from drinfeldlab.fields.heights import polys_up_to
    from drinfeldlab.heights.canonical import h_phi

    if M.descriptor.is_tower:
        raise UnsupportedFieldError("the integral-model scan runs over F_q(T) only")
    if max_degree < 0:
        raise DomainError("the integral-model scan needs max_degree >= 0")
    minimal, _ = minimal_global_model(M)
    h_j = weighted_height(M.coeffs, M.weights())
    deg_d = minimal_discriminant(M).degree
    bound = 2 * max(h_j, deg_d)
    candidates: List[Tuple[Fraction, RatFunc, DrinfeldModule]] = []
    for poly in polys_up_to(M.descriptor.field, max_degree, monic=True):
        beta = RatFunc.from_poly(poly)
        model = conjugate(minimal, beta)
        candidates.append((h_phi(model), beta, model))
    scanned = len(candidates)
    h, beta, model = min(candidates, key=lambda item: item[0])
    conclusive = h <= bound
    if not conclusive:
        get_logger().warning("integral-model scan inconclusive: best h(phi)=%s > %s", h, bound)
    return LowerNorthcottReport(conclusive, h, bound, h_j, deg_d, model, beta, scanned)
