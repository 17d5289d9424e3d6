"""Per-place invariants of a Drinfeld module.

- c_v: v(a_r) deg(v) / (q^r - 1), the offset between log|x| and the Green's
  function near infinity.
- j_v: max_j log|a_j|_v / (q^j - 1) + c_v, zero exactly at places of
  potentially good reduction.
- log B_T: escape radius, the largest root magnitude of phi_T(x)/x read off
  its Newton polygon, plus log+|1/T| / (q^r - 1).
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

from drinfeldlab.drinfeld.module import DrinfeldModule
from drinfeldlab.drinfeld.newton import NewtonPolygon
from drinfeldlab.fields.places import Place, log_abs, log_plus, valuation
from drinfeldlab.utils.errors import DomainError


class ReductionType(str, Enum):
    GOOD = "Good"
    POTENTIALLY_GOOD = "PotentiallyGood"
    PERSISTENTLY_BAD = "PersistentlyBad"


def c_v(M: DrinfeldModule, v: Place) -> Fraction:
    return Fraction(valuation(M.leading, v) * v.degree, M.q ** M.rank - 1)


def j_phi_v(M: DrinfeldModule, v: Place) -> Fraction:
    q = M.q
    best = max(
        log_abs(a, v) / (q ** j - 1)
        for j, a in enumerate(M.coeffs, start=1)
        if not a.is_zero()
    )
    return best + c_v(M, v)


def newton_polygon_T(M: DrinfeldModule, v: Place) -> NewtonPolygon:
    """Newton polygon of phi_T(x)/x = T + a_1 x^(q-1) + ... + a_r x^(q^r - 1)."""
    q = M.q
    terms = [
        (q ** i - 1, log_abs(a, v))
        for i, a in enumerate(M.twisted_coeffs())
        if not a.is_zero()
    ]
    return NewtonPolygon.from_log_abs(terms)


def B_T_v(M: DrinfeldModule, v: Place) -> Fraction:
    """log B_T at v."""
    q, r = M.q, M.rank
    inv_T = M.descriptor.T.inverse()
    return newton_polygon_T(M, v).max_slope() + log_plus(inv_T, v) / (q ** r - 1)


def reduction_type(M: DrinfeldModule, v: Place) -> ReductionType:
    """Good / PotentiallyGood / PersistentlyBad at a finite place."""
    if M.descriptor.is_infinite(v):
        raise DomainError("reduction type is only defined at finite places")
    from drinfeldlab.minimality.discriminant import local_min_disc

    if j_phi_v(M, v) > 0:
        return ReductionType.PERSISTENTLY_BAD
    disc, _ = local_min_disc(M, v)
    return ReductionType.GOOD if disc == 0 else ReductionType.POTENTIALLY_GOOD
