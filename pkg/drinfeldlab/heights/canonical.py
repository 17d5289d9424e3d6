"""Canonical heights by two independent routes.

Method A (global): the height-difference bounds give
    -B_lower <= h_hat(y) - h(y) <= B_upper,
and h_hat(phi_T^N(x)) = q^(rN) h_hat(x), so one exact iterate pins h_hat(x)
down to an interval of width q^(-rN) (B_lower + B_upper).

Method B (local): h_hat(x) is the sum of the Green's functions G_v(x) over the
finitely many places where x or the coefficients are not units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.drinfeld.local import c_v
from drinfeldlab.drinfeld.module import DrinfeldModule, j_invariant
from drinfeldlab.fields.heights import naive_height, weighted_height
from drinfeldlab.fields.places import INFINITY, Place, log_abs, sort_places, support
from drinfeldlab.heights.green import DEFAULT_MAX_DEGREE, GreenResult, Orbit, green_local
from drinfeldlab.heights.interval import HeightInterval, format_rational
from drinfeldlab.utils.errors import DomainError
from drinfeldlab.utils.logging import get_logger

DEFAULT_TOL_EXPONENT = 6


@dataclass(frozen=True)
class ZimmerBounds:
    C1: Fraction
    C2: Fraction
    h_phi: Fraction
    q: int
    r: int

    @property
    def B_lower(self) -> Fraction:
        return self.C1 + self.h_phi / (1 - Fraction(1, self.q ** self.r))

    @property
    def B_upper(self) -> Fraction:
        return self.h_phi + self.C2

    @property
    def B(self) -> Fraction:
        return max(self.B_lower, self.B_upper)

    def to_dict(self) -> Dict[str, object]:
        return {
            "C1": format_rational(self.C1),
            "C2": format_rational(self.C2),
            "hPhi": format_rational(self.h_phi),
            "BLower": format_rational(self.B_lower),
            "BUpper": format_rational(self.B_upper),
        }


def h_phi(M: DrinfeldModule) -> Fraction:
    """h(phi) = h(j_phi) + h(a_r) / (q^r - 1)."""
    hint = list(M.places_hint) or None
    h_j = weighted_height(M.coeffs, M.weights(), places=hint)
    return h_j + naive_height(M.leading) / (M.q ** M.rank - 1)


def zimmer_bounds(M: DrinfeldModule) -> ZimmerBounds:
    q, r = M.q, M.rank
    qr = q ** r
    if M.descriptor.is_tower:
        c1 = c2 = Fraction(0)
    else:
        c1, c2 = Fraction(qr, (qr - 1) ** 2), Fraction(1, qr - 1)
    return ZimmerBounds(c1, c2, h_phi(M), q, r)


def default_tol(q: int) -> Fraction:
    return Fraction(1, q ** DEFAULT_TOL_EXPONENT)


@dataclass
class CanonicalHeight:
    """Method A result together with how it was obtained."""
    interval: HeightInterval
    steps: int
    target_steps: int
    truncated: bool
    bounds: ZimmerBounds

    def to_dict(self) -> Dict[str, object]:
        return {
            "interval": self.interval.to_dict(),
            "steps": self.steps,
            "targetSteps": self.target_steps,
            "truncated": self.truncated,
            "bounds": self.bounds.to_dict(),
        }


def steps_for_tolerance(bounds: ZimmerBounds, tol: Fraction) -> int:
    """Least N with q^(-rN) B <= tol / 2."""
    qr = bounds.q ** bounds.r
    n = 0
    while bounds.B / Fraction(qr) ** n > tol / 2:
        n += 1
    return n


def canonical_height_detail(
    M: DrinfeldModule,
    x: RatFunc,
    tol: Optional[Fraction] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    bounds: Optional[ZimmerBounds] = None,
    orbit: Optional[Orbit] = None,
) -> CanonicalHeight:
    tol = default_tol(M.q) if tol is None else Fraction(tol)
    if tol <= 0:
        raise DomainError("tol must be positive")
    bounds = bounds or zimmer_bounds(M)
    if x.is_zero():
        return CanonicalHeight(HeightInterval.point(0), 0, 0, False, bounds)
    target = steps_for_tolerance(bounds, tol)
    orbit = orbit or Orbit(M, x, max_degree)
    n = orbit.last_index(target)
    if orbit.preperiodic:
        return CanonicalHeight(HeightInterval.point(0), n, target, False, bounds)
    truncated = n < target
    if truncated:
        get_logger().warning(
            "canonical height: degree budget %d reached after %d of %d steps; interval is wider than tol",
            max_degree, n, target,
        )
    scale = Fraction(1, (M.q ** M.rank) ** n)
    h_y = naive_height(orbit.points[n])
    raw = HeightInterval((h_y - bounds.B_lower) * scale, (h_y + bounds.B_upper) * scale)
    return CanonicalHeight(raw.clamp_nonnegative(), n, target, truncated, bounds)


def canonical_height(
    M: DrinfeldModule,
    x: RatFunc,
    tol: Optional[Fraction] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> HeightInterval:
    """h_hat(x) to within tol (Method A)."""
    return canonical_height_detail(M, x, tol, max_degree).interval


@dataclass(frozen=True)
class PlaceTerm:
    place: Place
    green: GreenResult
    local_height: HeightInterval

    def to_dict(self) -> Dict[str, object]:
        from drinfeldlab.lab.codec import encode_place

        return {
            "place": encode_place(self.place),
            "green": self.green.to_dict(),
            "lambda": self.local_height.to_dict(),
        }


@dataclass
class LocalDecomposition:
    total: HeightInterval
    terms: List[PlaceTerm] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {"total": self.total.to_dict(), "terms": [t.to_dict() for t in self.terms]}


def relevant_places(M: DrinfeldModule, x: RatFunc, extra: Sequence[Place] = ()) -> List[Place]:
    """Infinity, the support of x and of every a_j (a_r^-1 included)."""
    hint = sort_places(list(M.places_hint) + list(extra)) or None
    places: List[Place] = [INFINITY]
    if not x.is_zero():
        places.extend(support(x, places_hint=hint))
    for a in M.coeffs:
        if not a.is_zero() and not a.is_constant():
            places.extend(support(a, places_hint=hint))
    return sort_places(places)


def local_decomposition(
    M: DrinfeldModule,
    x: RatFunc,
    n_max: int = 8,
    max_degree: int = DEFAULT_MAX_DEGREE,
    places_hint: Sequence[Place] = (),
) -> LocalDecomposition:
    """Per-place Green's functions and local heights of x, sharing one orbit."""
    if x.is_zero():
        return LocalDecomposition(HeightInterval.point(0))
    orbit = Orbit(M, x, max_degree)
    terms: List[PlaceTerm] = []
    total = HeightInterval.point(0)
    for v in relevant_places(M, x, places_hint):
        green = green_local(M, v, x, n_max, orbit=orbit)
        terms.append(PlaceTerm(v, green, green.value + (c_v(M, v) - log_abs(x, v))))
        total = total + green.value
    get_logger().debug("local decomposition over %d place(s): %s", len(terms), total)
    return LocalDecomposition(total, terms)


def canonical_height_local(
    M: DrinfeldModule,
    x: RatFunc,
    n_max: int = 8,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> HeightInterval:
    """h_hat(x) as the sum of G_v(x) over the relevant places (Method B)."""
    return local_decomposition(M, x, n_max, max_degree).total


def j_height(M: DrinfeldModule) -> Fraction:
    """h(j_phi) alone, for reports."""
    hint = list(M.places_hint) or None
    return weighted_height(j_invariant(M).coords, M.weights(), places=hint)
