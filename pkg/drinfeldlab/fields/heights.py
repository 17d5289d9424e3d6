"""Naive and weighted heights, the product formula, bounded-height enumeration."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterator, List, Optional, Sequence

from drinfeldlab.algebra.ratfunc import FunctionField, RatFunc
from drinfeldlab.algebra.upoly import UPoly, upoly_gcd
from drinfeldlab.fields.places import (
    INFINITY,
    Element,
    FactoredRatFunc,
    Place,
    log_abs,
    sort_places,
    support,
)
from drinfeldlab.utils.errors import DomainError


def _value(x: Element) -> RatFunc:
    return x.value if isinstance(x, FactoredRatFunc) else x


def naive_height(x: Element) -> Fraction:
    """h(x) = max(deg num, deg den); only gcds are needed, so any instance works."""
    return Fraction(_value(x).height())


def product_formula_sum(x: Element) -> Fraction:
    """Sum of log|x|_v over the support of x and infinity; always 0."""
    places = sort_places(list(support(x)) + [INFINITY])
    return sum((log_abs(x, v) for v in places), Fraction(0))


def weighted_height(
    coords: Sequence[Element],
    weights: Sequence[int],
    places: Optional[Sequence[Place]] = None,
) -> Fraction:
    """Height on weighted projective space.

    Sum over places of max_i log|x_i|_v / w_i, zero coordinates skipped.
    `places` is a hint for the tower, where supports cannot be computed.
    """
    if len(coords) != len(weights):
        raise DomainError("coordinate and weight lists differ in length")
    nonzero = [(x, w) for x, w in zip(coords, weights) if not _value(x).is_zero()]
    if not nonzero:
        raise DomainError("weighted height of the all-zero point")
    candidate: List[Place] = [INFINITY]
    for x, _ in nonzero:
        candidate.extend(support(x, places_hint=places))
    total = Fraction(0)
    for v in sort_places(candidate):
        total += max(log_abs(x, v) / w for x, w in nonzero)
    return total


def polys_up_to(fld: FunctionField, degree: int, monic: bool) -> Iterator[UPoly]:
    fq = fld.base
    for d in range(0, degree + 1):
        if monic:
            for lower in product(range(fq.q), repeat=d):
                yield fld.poly(tuple(lower) + (fq.one,))
        else:
            for lead in range(1, fq.q):
                for lower in product(range(fq.q), repeat=d):
                    yield fld.poly(tuple(lower) + (lead,))


def enumerate_bounded_height(fld: FunctionField, bound: int) -> Iterator[RatFunc]:
    """Every x in F_q(T) with h(x) <= bound, as coprime (num, monic den) pairs.

    0 comes first; the order is deterministic.
    """
    yield fld.zero
    dens = list(polys_up_to(fld, bound, monic=True))
    for num in polys_up_to(fld, bound, monic=False):
        for den in dens:
            if upoly_gcd(num, den).is_one():
                yield RatFunc(num, den)


def count_bounded_height(q: int, bound: int) -> int:
    """#{x in F_q(T) : h(x) <= bound}, by Moebius-style recursion on the gcd degree.

    Pairs (f, g) with g monic and max degree <= B number
    N(B) = q^(B+1) (q^(B+1) - 1) / (q - 1); splitting by the degree k of the gcd
    gives N(B) = sum_k q^k C(B - k).
    """
    counts: List[int] = []
    for b in range(bound + 1):
        total = q ** (b + 1) * (q ** (b + 1) - 1) // (q - 1)
        total -= sum(q ** k * counts[b - k] for k in range(1, b + 1))
        counts.append(total)
    return counts[bound]
