"""Green's functions and local heights at one place.

G_v(x) = lim q^(-rN) log+|phi_T^N(x)|_v. Once an iterate y_n leaves the disc
of radius B_T the limit is known in closed form,

    G_v(x) = q^(-rn) (log|y_n|_v - c_v),

and a vanishing or repeating iterate means x is preperiodic, so G_v(x) = 0.
Otherwise we stop after N steps with the certified enclosure

    0 <= G_v(x) <= q^(-rN) max(0, max(log|y_N|_v, log B_T) - c_v),

which holds because a disc of radius rho > B_T maps into the disc of log
radius q^r log rho + log|a_r|.

One `Orbit` can serve every place of a global computation; it also stops
early when iterates would exceed the configured degree budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.drinfeld.local import B_T_v, c_v
from drinfeldlab.drinfeld.module import DrinfeldModule, phi_a
from drinfeldlab.drinfeld.newton import NewtonPolygon
from drinfeldlab.drinfeld.skew import SkewPoly
from drinfeldlab.fields.places import Place, log_abs, valuation
from drinfeldlab.heights.interval import HeightInterval
from drinfeldlab.utils.errors import DomainError
from drinfeldlab.utils.logging import get_logger

DEFAULT_MAX_DEGREE = 4096


class Orbit:
    """Exact forward orbit x, f(x), f(f(x)), ... of an additive map f."""

    def __init__(
        self,
        M: DrinfeldModule,
        x: RatFunc,
        max_degree: int = DEFAULT_MAX_DEGREE,
        step: Optional[SkewPoly] = None,
    ) -> None:
        self.M = M
        self.step = step if step is not None else M.phi_T
        self.max_degree = max_degree
        self.points: List[RatFunc] = [x]
        self._seen: Dict[RatFunc, int] = {x: 0}
        self.preperiodic = x.is_zero()
        self.truncated = False
        self._coeff_height = max(c.height() for c in self.step.coeffs)

    def __len__(self) -> int:
        return len(self.points)

    def get(self, n: int) -> Optional[RatFunc]:
        """y_n, or None when the orbit stopped before n (cycle or degree budget)."""
        while len(self.points) <= n:
            if self.preperiodic or self.truncated:
                return None
            y = self.points[-1]
            predicted = self.step.q ** self.step.degree * y.height() + self._coeff_height
            if predicted > self.max_degree:
                self.truncated = True
                get_logger().debug(
                    "orbit stopped at step %d: next degree ~%d exceeds budget %d",
                    len(self.points) - 1, predicted, self.max_degree,
                )
                return None
            nxt = self.step(y)
            if nxt.is_zero() or nxt in self._seen:
                self.preperiodic = True
            else:
                self._seen[nxt] = len(self.points)
            self.points.append(nxt)
        return self.points[n]

    def last_index(self, n: int) -> int:
        """Largest available index <= n."""
        self.get(n)
        return min(n, len(self.points) - 1)


@dataclass(frozen=True)
class GreenResult:
    value: HeightInterval
    escaped_at: Optional[int] = None
    closed_form: bool = False

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value.to_dict(),
            "escapedAt": self.escaped_at,
            "closedForm": self.closed_form,
        }


_ZERO = GreenResult(HeightInterval.point(0), None, True)


def good_reduction_certificate(M: DrinfeldModule, v: Place, x: RatFunc) -> bool:
    """v finite, every a_j integral, a_r a unit and x integral: then G_v(x) = 0."""
    if M.descriptor.is_infinite(v):
        return False
    if any(not a.is_zero() and valuation(a, v) < 0 for a in M.coeffs):
        return False
    return valuation(M.leading, v) == 0 and valuation(x, v) >= 0


def _escape_rate(
    orbit: Orbit,
    v: Place,
    degree_factor: int,
    c: Fraction,
    log_b: Fraction,
    n_max: int,
) -> GreenResult:
    last: Optional[RatFunc] = None
    last_n = 0
    for n in range(n_max + 1):
        y = orbit.get(n)
        if y is None:
            break
        if y.is_zero():
            return _ZERO
        la = log_abs(y, v)
        if la > log_b:
            value = (la - c) / Fraction(degree_factor) ** n
            return GreenResult(HeightInterval.point(value), n, True)
        last, last_n = y, n
    if orbit.preperiodic or last is None:
        return _ZERO
    upper = max(Fraction(0), max(log_abs(last, v), log_b) - c) / Fraction(degree_factor) ** last_n
    return GreenResult(HeightInterval(Fraction(0), upper), None, False)


def green_local(
    M: DrinfeldModule,
    v: Place,
    x: RatFunc,
    n_max: int = 8,
    orbit: Optional[Orbit] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> GreenResult:
    """G_v(x) for phi_T, exact when the orbit escapes or x is preperiodic."""
    if x.is_zero():
        return _ZERO
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if good_reduction_certificate(M, v, x):
        return _ZERO
    if orbit is None:
        orbit = Orbit(M, x, max_degree)
    return _escape_rate(orbit, v, M.q ** M.rank, c_v(M, v), B_T_v(M, v), n_max)


def escape_radius(step: SkewPoly, v: Place, c: Fraction) -> Fraction:
    """log of a radius beyond which the leading term of `step` dominates and grows."""
    terms = [(step.q ** i - 1, log_abs(a, v)) for i, a in enumerate(step.coeffs) if not a.is_zero()]
    return max(NewtonPolygon.from_log_abs(terms).max_slope(), c)


def green_local_a(
    M: DrinfeldModule,
    v: Place,
    x: RatFunc,
    a: UPoly,
    n_max: int = 4,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> GreenResult:
    """Escape rate of phi_a for a non-constant a; agrees with `green_local`."""
    if a.degree < 1:
        raise DomainError("the escape rate needs a non-constant a")
    if x.is_zero():
        return _ZERO
    step = phi_a(M, a)
    c = c_v(M, v)
    orbit = Orbit(M, x, max_degree, step=step)
    return _escape_rate(orbit, v, M.q ** (M.rank * a.degree), c, escape_radius(step, v, c), n_max)


def lambda_local(
    M: DrinfeldModule,
    v: Place,
    x: RatFunc,
    n_max: int = 8,
    orbit: Optional[Orbit] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> HeightInterval:
    """lambda_v(x) = -log|x|_v + G_v(x) + c_v."""
    if x.is_zero():
        raise DomainError("the local height has a pole at 0")
    green = green_local(M, v, x, n_max, orbit, max_degree)
    return green.value + (c_v(M, v) - log_abs(x, v))


def is_T_generic(M: DrinfeldModule, v: Place, x: RatFunc) -> bool:
    """No ultrametric cancellation in phi_T(x) at v."""
    if x.is_zero():
        raise DomainError("T-genericity is defined for nonzero x")
    y = M(x)
    if y.is_zero():
        return False
    q = M.q
    lx = log_abs(x, v)
    top = max(log_abs(a, v) + q ** i * lx for i, a in enumerate(M.twisted_coeffs()) if not a.is_zero())
    return log_abs(y, v) == top
