"""Newton polygons for a non-archimedean absolute value.

Points are (exponent, w) with w = -log|c| for the nonzero coefficients c of
a polynomial. The lower convex hull's segments give the root magnitudes: a
segment of slope s and horizontal length n carries n roots with log|root| = s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from drinfeldlab.utils.errors import DomainError

Point = Tuple[int, Fraction]


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class NewtonPolygon:
    points: Tuple[Point, ...]

    @classmethod
    def from_log_abs(cls, terms: Sequence[Tuple[int, Fraction]]) -> "NewtonPolygon":
        """Build from (exponent, log|c|) pairs of the nonzero coefficients."""
        return cls(tuple(sorted((e, -Fraction(la)) for e, la in terms)))

    def __post_init__(self) -> None:
        if not self.points:
            raise DomainError("Newton polygon of the zero polynomial")

    def vertices(self) -> List[Point]:
        """Lower convex hull, left to right (monotone chain)."""
        hull: List[Point] = []
        for pt in self.points:
            # equal abscissae cannot occur for polynomial coefficients
            while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
                hull.pop()
            hull.append(pt)
        return hull

    def slopes(self) -> List[Tuple[Fraction, int]]:
        """(slope, length) per segment, slopes increasing."""
        v = self.vertices()
        return [
            (Fraction(b[1] - a[1]) / (b[0] - a[0]), b[0] - a[0])
            for a, b in zip(v, v[1:])
        ]

    def root_log_abs(self) -> List[Fraction]:
        """Multiset of log|root| over the nonzero roots."""
        out: List[Fraction] = []
        for s, n in self.slopes():
            out.extend([s] * n)
        return out

    def max_slope(self) -> Fraction:
        """log of the largest root magnitude; needs at least two points."""
        slopes = self.slopes()
        if not slopes:
            raise DomainError("a monomial has no nonzero roots")
        return slopes[-1][0]
