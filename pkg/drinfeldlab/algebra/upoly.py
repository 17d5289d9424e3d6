"""Univariate polynomials over a coefficient domain.

A domain is any object exposing `zero`, `one`, `add`, `sub`, `neg`, `mul`,
`inv`, `is_zero`, `frob`, `key`, `q` and `is_finite` on raw coefficient
values. Two domains exist: `FiniteField` (raw values are ints) and
`FunctionField` (raw values are `RatFunc`). Domains may also provide
`poly_mul` / `poly_divmod` / `poly_gcd` kernels on coefficient tuples; the
generic schoolbook + Karatsuba versions below are the fallback.

Coefficients are stored lowest degree first with no trailing zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Tuple

from drinfeldlab.utils.errors import DivisionByZeroError, FieldMismatchError

Coeffs = Tuple[Any, ...]

_KARATSUBA_THRESHOLD = 32


def _strip(dom: Any, coeffs: Iterable[Any]) -> Coeffs:
    c = list(coeffs)
    while c and dom.is_zero(c[-1]):
        c.pop()
    return tuple(c)


def _add_coeffs(dom: Any, a: Coeffs, b: Coeffs) -> Coeffs:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] = dom.add(out[i], y)
    return _strip(dom, out)


def _sub_coeffs(dom: Any, a: Coeffs, b: Coeffs) -> Coeffs:
    out = list(a) + [dom.zero] * max(0, len(b) - len(a))
    for i, y in enumerate(b):
        out[i] = dom.sub(out[i], y)
    return _strip(dom, out)


def _schoolbook(dom: Any, a: Coeffs, b: Coeffs) -> Coeffs:
    out = [dom.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if dom.is_zero(x):
            continue
        for j, y in enumerate(b):
            if not dom.is_zero(y):
                out[i + j] = dom.add(out[i + j], dom.mul(x, y))
    return _strip(dom, out)


def mul_generic(dom: Any, a: Coeffs, b: Coeffs) -> Coeffs:
    """Schoolbook below a threshold, Karatsuba above it."""
    if not a or not b:
        return ()
    if min(len(a), len(b)) < _KARATSUBA_THRESHOLD:
        return _schoolbook(dom, a, b)
    m = max(len(a), len(b)) // 2
    a0, a1 = _strip(dom, a[:m]), a[m:]
    b0, b1 = _strip(dom, b[:m]), b[m:]
    z0 = mul_generic(dom, a0, b0)
    z2 = mul_generic(dom, a1, b1)
    z1 = _sub_coeffs(dom, _sub_coeffs(dom, mul_generic(dom, _add_coeffs(dom, a0, a1), _add_coeffs(dom, b0, b1)), z0), z2)
    out = [dom.zero] * (len(a) + len(b) - 1)
    for shift, part in ((0, z0), (m, z1), (2 * m, z2)):
        for i, c in enumerate(part):
            out[i + shift] = dom.add(out[i + shift], c)
    return _strip(dom, out)


def divmod_generic(dom: Any, a: Coeffs, b: Coeffs) -> Tuple[Coeffs, Coeffs]:
    if not b:
        raise DivisionByZeroError("polynomial division by zero")
    db = len(b) - 1
    if len(a) <= db:
        return (), a
    r = list(a)
    inv_lc = dom.inv(b[-1])
    quot = [dom.zero] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        if dom.is_zero(r[i]):
            continue
        c = dom.mul(r[i], inv_lc)
        quot[i - db] = c
        off = i - db
        for j in range(db + 1):
            if not dom.is_zero(b[j]):
                r[off + j] = dom.sub(r[off + j], dom.mul(c, b[j]))
    return _strip(dom, quot), _strip(dom, r[:db])


def _monic_coeffs(dom: Any, a: Coeffs) -> Coeffs:
    if not a:
        return a
    lc = a[-1]
    if lc == dom.one:
        return a
    inv = dom.inv(lc)
    return tuple(dom.mul(c, inv) for c in a)


def gcd_generic(dom: Any, a: Coeffs, b: Coeffs) -> Coeffs:
    divmod_ = getattr(dom, "poly_divmod", None) or (lambda x, y: divmod_generic(dom, x, y))
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return _monic_coeffs(dom, a)


@dataclass(frozen=True)
class UPoly:
    """Immutable polynomial in `var` over `domain`."""
    domain: Any
    coeffs: Coeffs
    var: str = "T"

    def __post_init__(self) -> None:
        coeffs = self.coeffs
        if coeffs and self.domain.is_zero(coeffs[-1]) or not isinstance(coeffs, tuple):
            object.__setattr__(self, "coeffs", _strip(self.domain, coeffs))

    # -- constructors -------------------------------------------------------------
    @classmethod
    def zero(cls, domain: Any, var: str = "T") -> "UPoly":
        return cls(domain, (), var)

    @classmethod
    def one(cls, domain: Any, var: str = "T") -> "UPoly":
        return cls(domain, (domain.one,), var)

    @classmethod
    def constant(cls, domain: Any, c: Any, var: str = "T") -> "UPoly":
        return cls(domain, (c,), var)

    @classmethod
    def monomial(cls, domain: Any, c: Any, n: int, var: str = "T") -> "UPoly":
        return cls(domain, (domain.zero,) * n + (c,), var)

    @classmethod
    def gen(cls, domain: Any, var: str = "T") -> "UPoly":
        return cls(domain, (domain.zero, domain.one), var)

    # -- basic accessors --------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == self.domain.one

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading(self) -> Any:
        return self.coeffs[-1] if self.coeffs else self.domain.zero

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.domain.one

    def monic(self) -> "UPoly":
        return UPoly(self.domain, _monic_coeffs(self.domain, self.coeffs), self.var)

    def key(self) -> Tuple[Any, ...]:
        """Total-order key, used for deterministic sorting."""
        return (len(self.coeffs), tuple(self.domain.key(c) for c in reversed(self.coeffs)))

    def _same(self, other: "UPoly") -> None:
        if not isinstance(other, UPoly) or other.domain != self.domain or other.var != self.var:
            raise FieldMismatchError(f"cannot combine polynomials over {self.domain}[{self.var}] and {other!r}")

    # -- arithmetic -----------------------------------------------------------------
    def __add__(self, other: "UPoly") -> "UPoly":
        self._same(other)
        return UPoly(self.domain, _add_coeffs(self.domain, self.coeffs, other.coeffs), self.var)

    def __sub__(self, other: "UPoly") -> "UPoly":
        self._same(other)
        return UPoly(self.domain, _sub_coeffs(self.domain, self.coeffs, other.coeffs), self.var)

    def __neg__(self) -> "UPoly":
        return UPoly(self.domain, tuple(self.domain.neg(c) for c in self.coeffs), self.var)

    def __mul__(self, other: "UPoly") -> "UPoly":
        self._same(other)
        dom = self.domain
        if self.is_one():
            return other
        if other.is_one():
            return self
        kernel = getattr(dom, "poly_mul", None)
        coeffs = kernel(self.coeffs, other.coeffs) if kernel else mul_generic(dom, self.coeffs, other.coeffs)
        return UPoly(dom, coeffs, self.var)

    def scale(self, c: Any) -> "UPoly":
        dom = self.domain
        if dom.is_zero(c):
            return UPoly(dom, (), self.var)
        return UPoly(dom, tuple(dom.mul(c, x) for x in self.coeffs), self.var)

    def shift(self, n: int) -> "UPoly":
        """Multiply by var^n."""
        if not self.coeffs:
            return self
        return UPoly(self.domain, (self.domain.zero,) * n + self.coeffs, self.var)

    def __pow__(self, n: int) -> "UPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = UPoly.one(self.domain, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __divmod__(self, other: "UPoly") -> Tuple["UPoly", "UPoly"]:
        self._same(other)
        if other.is_zero():
            raise DivisionByZeroError("polynomial division by zero")
        if other.is_one():
            return self, UPoly(self.domain, (), self.var)
        kernel = getattr(self.domain, "poly_divmod", None)
        if kernel:
            q, r = kernel(self.coeffs, other.coeffs)
        else:
            q, r = divmod_generic(self.domain, self.coeffs, other.coeffs)
        return UPoly(self.domain, q, self.var), UPoly(self.domain, r, self.var)

    def __floordiv__(self, other: "UPoly") -> "UPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "UPoly") -> "UPoly":
        return divmod(self, other)[1]

    def divides(self, other: "UPoly") -> bool:
        return (other % self).is_zero()

    def __call__(self, x: Any) -> Any:
        """Horner evaluation at a raw domain value."""
        dom = self.domain
        acc = dom.zero
        for c in reversed(self.coeffs):
            acc = dom.add(dom.mul(acc, x), c)
        return acc

    def frob(self) -> "UPoly":
        """Exact q-th power: Frobenius on coefficients, exponents times q."""
        dom = self.domain
        q = dom.q
        if len(self.coeffs) <= 1:
            return UPoly(dom, tuple(dom.frob(c) for c in self.coeffs), self.var)
        out = [dom.zero] * ((len(self.coeffs) - 1) * q + 1)
        for i, c in enumerate(self.coeffs):
            out[i * q] = dom.frob(c)
        return UPoly(dom, tuple(out), self.var)

    def derivative(self) -> "UPoly":
        dom = self.domain
        out = []
        for i, c in enumerate(self.coeffs[1:], start=1):
            out.append(dom.mul(_int_image(dom, i), c))
        return UPoly(dom, tuple(out), self.var)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if self.domain.is_zero(c):
                continue
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            cs = repr(c)
            if not mono:
                terms.append(cs)
            elif c == self.domain.one:
                terms.append(mono)
            else:
                terms.append(f"({cs})*{mono}")
        return " + ".join(terms)


def _int_image(dom: Any, n: int) -> Any:
    acc = dom.zero
    for _ in range(n % getattr(dom, "p", n + 1)):
        acc = dom.add(acc, dom.one)
    return acc


def upoly_gcd(f: UPoly, g: UPoly) -> UPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    f._same(g)
    kernel = getattr(f.domain, "poly_gcd", None)
    coeffs = kernel(f.coeffs, g.coeffs) if kernel else gcd_generic(f.domain, f.coeffs, g.coeffs)
    return UPoly(f.domain, coeffs, f.var)


def upoly_xgcd(f: UPoly, g: UPoly) -> Tuple[UPoly, UPoly, UPoly]:
    """Return (d, s, t) with d = s*f + t*g and d monic (or zero)."""
    f._same(g)
    zero, one = UPoly.zero(f.domain, f.var), UPoly.one(f.domain, f.var)
    r0, r1, s0, s1, t0, t1 = f, g, one, zero, zero, one
    while not r1.is_zero():
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = f.domain.inv(r0.leading)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def pow_mod(f: UPoly, n: int, m: UPoly) -> UPoly:
    """f^n mod m by square-and-multiply."""
    result = UPoly.one(f.domain, f.var) % m
    base = f % m
    while n:
        if n & 1:
            result = (result * base) % m
        n >>= 1
        if n:
            base = (base * base) % m
    return result
