"""Torsion points of a Drinfeld module over F_q(T).

x is torsion iff h_hat(x) = 0 iff its phi_T-orbit is finite. Any iterate with
h(y) > B_lower has positive canonical height, so the orbit either leaves the
finite set {h <= B_lower} or cycles inside it.
"""

from __future__ import annotations

from itertools import product
from typing import List, Optional, Sequence, Set

from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.drinfeld.module import DrinfeldModule
from drinfeldlab.fields.heights import count_bounded_height, enumerate_bounded_height, naive_height
from drinfeldlab.heights.canonical import ZimmerBounds, zimmer_bounds
from drinfeldlab.utils.errors import DomainError, ResourceGuardError, UnsupportedFieldError
from drinfeldlab.utils.logging import get_logger


def is_torsion(
    M: DrinfeldModule,
    x: RatFunc,
    bounds: Optional[ZimmerBounds] = None,
    max_steps: Optional[int] = None,
) -> bool:
    """x is torsion: its phi_T-orbit reaches 0 or cycles below B_lower."""
    if M.descriptor.is_tower:
        raise UnsupportedFieldError("torsion detection needs a finite constant field")
    bounds = bounds or zimmer_bounds(M)
    seen: Set[RatFunc] = set()
    y = x
    while not y.is_zero():
        if naive_height(y) > bounds.B_lower:
            return False
        if y in seen:
            return True
        seen.add(y)
        if max_steps is not None and len(seen) > max_steps:
            raise ResourceGuardError(f"orbit of {x!r} neither escaped nor cycled", bound=max_steps)
        y = M(y)
    return True


def torsion_submodule(M: DrinfeldModule, guard: int = 20000) -> List[RatFunc]:
    """All torsion points, sorted by (height, den, num)."""
    if M.descriptor.is_tower:
        raise UnsupportedFieldError("torsion enumeration needs a finite constant field")
    bounds = zimmer_bounds(M)
    bound = int(bounds.B_lower)
    candidates = count_bounded_height(M.q, bound)
    if candidates > guard:
        raise ResourceGuardError(
            f"{candidates} candidates of height <= {bound} exceed the guard {guard}", bound=bound
        )
    get_logger().debug("torsion search over %d candidates of height <= %d", candidates, bound)
    found = [x for x in enumerate_bounded_height(M.field, bound) if is_torsion(M, x, bounds)]
    return sorted(found, key=lambda x: x.key())


def verify_submodule(M: DrinfeldModule, points: Sequence[RatFunc]) -> bool:
    """Closed under phi_T and under addition; contains 0."""
    pool = set(points)
    if M.field.zero not in pool:
        return False
    if any(M(x) not in pool for x in pool):
        return False
    return all(x + y in pool for x in pool for y in pool)


def annihilator(M: DrinfeldModule, x: RatFunc, max_degree: int = 4) -> Optional[UPoly]:
    """Least monic a in F_q[T] with phi_a(x) = 0, smallest degree first and then
    lexicographic in (a_0, ..., a_(d-1)); None if deg a would exceed max_degree.

    phi_a(x) = sum c_k phi_T^k(x) is linear in the coefficients of a.
    """
    if max_degree < 0:
        raise DomainError("max_degree must be nonnegative")
    desc = M.descriptor
    fq = desc.fq
    orbit = [x]
    for _ in range(max_degree):
        orbit.append(M(orbit[-1]))
    scaled = [[desc.embed_fq(c) * y for c in fq.elements()] for y in orbit]
    for d in range(max_degree + 1):
        for lower in product(range(fq.q), repeat=d):
            total = orbit[d]
            for k, c in enumerate(lower):
                if c:
                    total = total + scaled[k][c]
            if total.is_zero():
                return desc.a_poly(tuple(lower) + (fq.one,))
    return None
