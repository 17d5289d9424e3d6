"""Local and global inequalities as checkable predicates.

Each check returns a `CheckOutcome`. A check is `applicable` when its
hypotheses hold on the given data; `holds` is then decided interval-aware:
an enclosure only counts as a violation when every value in it violates.
Scan drivers count non-holding applicable outcomes as violations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.drinfeld.local import B_T_v, ReductionType, c_v, j_phi_v, reduction_type
from drinfeldlab.drinfeld.module import DrinfeldModule, conjugate, phi_a
from drinfeldlab.fields.heights import naive_height
from drinfeldlab.fields.places import Place, log_abs, log_plus, sort_places, support, valuation
from drinfeldlab.heights.canonical import ZimmerBounds
from drinfeldlab.heights.green import green_local, is_T_generic, lambda_local
from drinfeldlab.heights.interval import HeightInterval, format_rational
from drinfeldlab.minimality.discriminant import (
    d_constant,
    finite_coefficient_places,
    local_min_disc,
    local_minimal_model,
)


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    applicable: bool
    holds: bool = True
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    place: Optional[Place] = None

    @property
    def violated(self) -> bool:
        return self.applicable and not self.holds

    def to_dict(self) -> Dict[str, object]:
        from drinfeldlab.lab.codec import encode_place

        return {
            "name": self.name,
            "applicable": self.applicable,
            "holds": self.holds,
            "lhs": None if self.lhs is None else format_rational(self.lhs),
            "rhs": None if self.rhs is None else format_rational(self.rhs),
            "place": None if self.place is None else encode_place(self.place),
        }


def _skip(name: str, v: Optional[Place] = None) -> CheckOutcome:
    return CheckOutcome(name, False, place=v)


def _log_plus_T(M: DrinfeldModule, v: Place) -> Fraction:
    return log_plus(M.descriptor.T, v)


def _log_plus_inv_T(M: DrinfeldModule, v: Place) -> Fraction:
    return log_plus(M.descriptor.T.inverse(), v)


# -- global ---------------------------------------------------------------------------


def check_height_difference(
    M: DrinfeldModule, x: RatFunc, h_hat: HeightInterval, bounds: ZimmerBounds
) -> CheckOutcome:
    """-B_lower <= h_hat(x) - h(x) <= B_upper."""
    diff = h_hat - naive_height(x)
    allowed = HeightInterval(-bounds.B_lower, bounds.B_upper)
    return CheckOutcome("heightdiff", True, diff.intersects(allowed), diff.mid, allowed.hi)


def check_height_agreement(a: HeightInterval, b: HeightInterval) -> CheckOutcome:
    """The global and local canonical heights are compatible."""
    holds = a.intersects(b) and (not (a.exact and b.exact) or a.lo == b.lo)
    return CheckOutcome("agreement", True, holds, a.mid, b.mid)


def check_positive_height(h_hat: HeightInterval) -> CheckOutcome:
    """A non-torsion point has a certified positive canonical height."""
    return CheckOutcome("jplacespositive", True, h_hat.lo > 0, h_hat.lo, Fraction(0))


# -- local ----------------------------------------------------------------------------


def check_generic_bound(M: DrinfeldModule, v: Place, x: RatFunc) -> CheckOutcome:
    """T-generic x with |phi_T(x)| <= B_T lies in the disc of log radius
    c_v + log+|1/T| / (q^r - 1)^2."""
    name = "genericbound"
    y = M(x)
    if x.is_zero() or y.is_zero() or not is_T_generic(M, v, x):
        return _skip(name, v)
    if log_abs(y, v) > B_T_v(M, v):
        return _skip(name, v)
    qr1 = M.q ** M.rank - 1
    rhs = c_v(M, v) + _log_plus_inv_T(M, v) / qr1 ** 2
    lhs = log_abs(x, v)
    return CheckOutcome(name, True, lhs <= rhs, lhs, rhs, v)


def check_phiT_small(M: DrinfeldModule, v: Place, x: RatFunc) -> CheckOutcome:
    """T-generic x with phi_T(x) small has -log|x| + c_v bounded below by j_v."""
    name = "phiTsmall"
    y = M(x)
    if x.is_zero() or y.is_zero() or not is_T_generic(M, v, x):
        return _skip(name, v)
    q, qr1 = M.q, M.q ** M.rank - 1
    c = c_v(M, v)
    inv_t = _log_plus_inv_T(M, v)
    if log_abs(y, v) > c + inv_t / qr1 ** 2:
        return _skip(name, v)
    lhs = c - log_abs(x, v)
    rhs = (1 - Fraction(1, q)) * j_phi_v(M, v) - inv_t / (q * qr1 ** 2)
    return CheckOutcome(name, True, lhs >= rhs, lhs, rhs, v)


def local_height_difference_bounds(M: DrinfeldModule, v: Place) -> HeightInterval:
    """Enclosure of lambda_v(x) - log+|1/x|_v valid for every nonzero x."""
    qr = M.q ** M.rank
    lp_t = _log_plus_T(M, v)
    j = j_phi_v(M, v)
    c = c_v(M, v)
    lower = -Fraction(qr, (qr - 1) ** 2) * lp_t - Fraction(qr, qr - 1) * j - max(Fraction(0), -c)
    upper = j + lp_t / (qr - 1) + max(Fraction(0), c)
    return HeightInterval(lower, upper)


def check_local_height_difference(
    M: DrinfeldModule, v: Place, x: RatFunc, n_max: int = 8
) -> CheckOutcome:
    if x.is_zero():
        return _skip("localheightdiff", v)
    diff = lambda_local(M, v, x, n_max) - log_plus(x.inverse(), v)
    allowed = local_height_difference_bounds(M, v)
    return CheckOutcome("localheightdiff", True, diff.intersects(allowed), diff.mid, allowed.hi, v)


def check_potentially_good_lower(
    M: DrinfeldModule, v: Place, x: RatFunc, n_max: int = 8
) -> CheckOutcome:
    """At a potentially good place with D_v > 0, lambda_v + G_v >= D_v / (d - 1)
    on the local minimal model."""
    name = "potgoodred"
    if x.is_zero() or M.descriptor.is_infinite(v):
        return _skip(name, v)
    d = d_constant(M.q, M.rank)
    if d <= 1 or reduction_type(M, v) is not ReductionType.POTENTIALLY_GOOD:
        return _skip(name, v)
    disc, _ = local_min_disc(M, v)
    if disc <= 0:
        return _skip(name, v)
    model = local_minimal_model(M, v)
    total = lambda_local(model, v, x, n_max) + green_local(model, v, x, n_max).value
    rhs = disc / (d - 1)
    return CheckOutcome(name, True, total.hi >= rhs, total.mid, rhs, v)


def check_greens_lower(M: DrinfeldModule, v: Place, x: RatFunc) -> CheckOutcome:
    """Outside the escape radius, G_v(x) >= (q - 1) / (q^r - 1) j_v."""
    name = "greenslower"
    if x.is_zero() or log_abs(x, v) <= B_T_v(M, v):
        return _skip(name, v)
    green = log_abs(x, v) - c_v(M, v)
    rhs = Fraction(M.q - 1, M.q ** M.rank - 1) * j_phi_v(M, v)
    return CheckOutcome(name, True, green >= rhs, green, rhs, v)


def check_green_functional_equation(
    M: DrinfeldModule, v: Place, x: RatFunc, a: UPoly, n_max: int = 8
) -> CheckOutcome:
    """G_v(phi_a(x)) = q^(r deg a) G_v(x)."""
    name = "greenfunctional"
    if x.is_zero():
        return _skip(name, v)
    lhs = green_local(M, v, phi_a(M, a)(x), n_max).value
    rhs = green_local(M, v, x, n_max).value.scale(M.q ** (M.rank * a.degree))
    return CheckOutcome(name, True, lhs.intersects(rhs), lhs.mid, rhs.mid, v)


def check_lambda_functional_equation(
    M: DrinfeldModule, v: Place, x: RatFunc, a: UPoly, n_max: int = 8
) -> CheckOutcome:
    """lambda(phi_a x) = |a|^r lambda(x) - log|phi_a(x) / (lead(phi_a) x^(|a|^r))|_v."""
    name = "lambdafunctional"
    step = phi_a(M, a)
    y = step(x) if not x.is_zero() else x
    if y.is_zero():
        return _skip(name, v)
    deg = M.q ** (M.rank * a.degree)
    correction = log_abs(y, v) - log_abs(step.coeffs[-1], v) - deg * log_abs(x, v)
    lhs = lambda_local(M, v, y, n_max)
    rhs = lambda_local(M, v, x, n_max).scale(deg) - correction
    return CheckOutcome(name, True, lhs.intersects(rhs), lhs.mid, rhs.mid, v)


def check_green_ultrametric(
    M: DrinfeldModule, v: Place, x: RatFunc, y: RatFunc, n_max: int = 8
) -> CheckOutcome:
    """G_v(x + y) <= max(G_v(x), G_v(y))."""
    lhs = green_local(M, v, x + y, n_max).value
    rhs = max(green_local(M, v, x, n_max).value.hi, green_local(M, v, y, n_max).value.hi)
    return CheckOutcome("greenultrametric", True, lhs.lo <= rhs, lhs.lo, rhs, v)


# -- discriminants --------------------------------------------------------------------


def check_disc_sandwich(M: DrinfeldModule, v: Place) -> CheckOutcome:
    """j_v <= D_v < j_v + deg(v)."""
    j = j_phi_v(M, v)
    disc, _ = local_min_disc(M, v)
    return CheckOutcome("discsandwich", True, j <= disc < j + v.degree, disc, j, v)


def check_disc_corollary(M: DrinfeldModule, v: Place) -> CheckOutcome:
    """j_v > 0 forces j_v > max(j_v, D_v) / (d + 1)."""
    j = j_phi_v(M, v)
    if j <= 0:
        return _skip("disccorollary", v)
    disc, _ = local_min_disc(M, v)
    rhs = max(j, disc) / (d_constant(M.q, M.rank) + 1)
    return CheckOutcome("disccorollary", True, j > rhs, j, rhs, v)


def check_conjugation_covariance(M: DrinfeldModule, beta: RatFunc) -> List[CheckOutcome]:
    """Delta(conjugate(M, beta)) = Delta(M) + (beta)_fin, with D unchanged."""
    N = conjugate(M, beta)
    places = sort_places(
        finite_coefficient_places(M)
        + [v for v in support(beta, places_hint=list(M.places_hint) or None) if not M.descriptor.is_infinite(v)]
    )
    out: List[CheckOutcome] = []
    for v in places:
        expected = c_v(M, v) + valuation(beta, v) * v.degree
        same_min = local_min_disc(N, v)[0] == local_min_disc(M, v)[0]
        out.append(CheckOutcome("conjcovariance", True, c_v(N, v) == expected and same_min, c_v(N, v), expected, v))
    return out


def local_checks(M: DrinfeldModule, v: Place, x: RatFunc, n_max: int = 8) -> List[CheckOutcome]:
    """Every per-place check on (M, v, x)."""
    return [
        check_generic_bound(M, v, x),
        check_phiT_small(M, v, x),
        check_local_height_difference(M, v, x, n_max),
        check_potentially_good_lower(M, v, x, n_max),
        check_greens_lower(M, v, x),
    ]
