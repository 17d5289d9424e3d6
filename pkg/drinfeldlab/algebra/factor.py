"""Factorization in F_q[T].

Square-free split -> distinct-degree split -> equal-degree split
(Cantor-Zassenhaus, with the trace map in characteristic 2). The equal-degree
step draws from a `random.Random(seed)` so results are reproducible; the final
list is sorted, so the seed never changes the output, only the work done.

Only finite coefficient fields are supported; over the tower F_q(T)(u) callers
must supply factored input instead.
"""

from __future__ import annotations

import random
from typing import List, Tuple

from drinfeldlab.algebra.upoly import UPoly, pow_mod, upoly_gcd
from drinfeldlab.utils.errors import DomainError, UnsupportedFieldError
from drinfeldlab.utils.logging import get_logger

Factorization = List[Tuple[UPoly, int]]


def _require_finite(f: UPoly) -> None:
    if not getattr(f.domain, "is_finite", False):
        raise UnsupportedFieldError(
            f"factorization over {f.domain!r} is not available; pass factored input instead"
        )


def _prime_factors(n: int) -> List[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _pth_root_poly(f: UPoly) -> UPoly:
    """g with g^p = f, for f whose exponents are all multiples of p."""
    dom = f.domain
    p = dom.p
    coeffs = tuple(dom.pth_root(c) for c in f.coeffs[::p])
    return UPoly(dom, coeffs, f.var)


def squarefree_decomposition(f: UPoly) -> Factorization:
    """Monic square-free parts with multiplicities (f need not be monic)."""
    _require_finite(f)
    f = f.monic()
    if f.degree < 1:
        return []
    p = f.domain.p
    factors: Factorization = []
    n = 1
    while True:
        df = f.derivative()
        if not df.is_zero():
            g = upoly_gcd(f, df)
            h = f // g
            i = 1
            while not h.is_one():
                G = upoly_gcd(g, h)
                H = h // G
                if H.degree > 0:
                    factors.append((H, i * n))
                g, h, i = g // G, G, i + 1
            if g.is_one():
                break
            f = g
        # what remains has only p-th power exponents
        f = _pth_root_poly(f)
        n *= p
        if f.degree < 1:
            break
    return _merge(factors)


def _merge(factors: Factorization) -> Factorization:
    acc: dict = {}
    for poly, e in factors:
        acc[poly] = acc.get(poly, 0) + e
    return sorted(acc.items(), key=lambda item: item[0].key())


def distinct_degree_factorization(f: UPoly) -> List[Tuple[UPoly, int]]:
    """Split a monic square-free f into products of irreducibles of equal degree."""
    _require_finite(f)
    q = f.domain.q
    x = UPoly.gen(f.domain, f.var)
    out: List[Tuple[UPoly, int]] = []
    h = x % f if f.degree > 0 else x
    d = 0
    while 2 * (d + 1) <= f.degree:
        d += 1
        h = pow_mod(h, q, f)
        g = upoly_gcd(h - x, f)
        if not g.is_one():
            out.append((g, d))
            f = f // g
            h = h % f if f.degree > 0 else h
    if f.degree > 0:
        out.append((f, f.degree))
    return out


def equal_degree_factorization(f: UPoly, d: int, rng: random.Random) -> List[UPoly]:
    """Irreducible factors (each of degree d) of a monic square-free f."""
    if f.degree <= d:
        return [f]
    dom = f.domain
    q, p = dom.q, dom.p
    n = f.degree
    while True:
        a = UPoly(dom, tuple(dom.random_element(rng) for _ in range(n)), f.var)
        if a.degree < 1:
            continue
        if p == 2:
            # absolute trace to F_2: sum of a^(2^i), i < e*d
            e = q.bit_length() - 1
            t, s = a % f, a % f
            for _ in range(e * d - 1):
                s = (s * s) % f
                t = t + s
            g = upoly_gcd(t, f)
        else:
            b = pow_mod(a, (q ** d - 1) // 2, f)
            g = upoly_gcd(b - UPoly.one(dom, f.var), f)
        if 0 < g.degree < n:
            get_logger().debug("equal-degree split: degree %d -> %d + %d", n, g.degree, n - g.degree)
            return equal_degree_factorization(g, d, rng) + equal_degree_factorization(f // g, d, rng)


def upoly_factor(f: UPoly, seed: int = 0) -> Factorization:
    """Factor f into monic irreducibles with multiplicities, sorted by `UPoly.key`.

    f equals leading(f) times the product of the returned powers.
    """
    if f.is_zero():
        raise DomainError("cannot factor the zero polynomial")
    _require_finite(f)
    rng = random.Random(seed)
    out: Factorization = []
    for part, mult in squarefree_decomposition(f):
        for block, d in distinct_degree_factorization(part):
            for irreducible in equal_degree_factorization(block, d, rng):
                out.append((irreducible, mult))
    return _merge(out)


def is_irreducible(f: UPoly) -> bool:
    """Rabin's test: x^(q^n) = x mod f and no smaller-degree block divides f."""
    _require_finite(f)
    n = f.degree
    if n < 1:
        return False
    if n == 1:
        return True
    f = f.monic()
    q = f.domain.q
    x = UPoly.gen(f.domain, f.var)
    for ell in _prime_factors(n):
        h = x
        for _ in range(n // ell):
            h = pow_mod(h, q, f)
        if not upoly_gcd(h - x, f).is_one():
            return False
    h = x
    for _ in range(n):
        h = pow_mod(h, q, f)
    return (h - x % f).is_zero()
