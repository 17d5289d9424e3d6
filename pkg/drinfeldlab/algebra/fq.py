"""Finite fields F_q, q = p^e.

Elements are plain ints in [0, q): the base-p digits of the int are the
coefficients of the element in F_p[x]/(modulus), lowest digit first. Prime
fields use modular arithmetic directly; extension fields multiply through
log/antilog tables built from a primitive element, the same layout as
classic table-driven GF(2^n) libraries.

`FiniteField` is the coefficient "domain" consumed by `UPoly`: it exposes
zero/one, the ring operations on raw ints, Frobenius, and fast polynomial
kernels (Kronecker substitution for prime fields, bit-packed ints for F_2).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from drinfeldlab.algebra import upoly as _upoly
from drinfeldlab.utils.errors import DivisionByZeroError, DomainError, FieldMismatchError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FqConfig:
    """Field parameters: characteristic p, degree e, monic modulus over F_p.

    The modulus is given lowest coefficient first and must be irreducible. For
    e = 1 it defaults to x and is unused.
    """
    p: int
    e: int = 1
    modulus: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise DomainError(f"characteristic {self.p} is not prime")
        if self.e < 1:
            raise DomainError("extension degree must be positive")
        mod = tuple(int(c) % self.p for c in self.modulus)
        if not mod:
            if self.e != 1:
                raise DomainError(f"F_{self.p}^{self.e} needs an explicit irreducible modulus")
            mod = (0, 1)
        if len(mod) != self.e + 1 or mod[-1] != 1:
            raise DomainError(f"modulus must be monic of degree {self.e}")
        object.__setattr__(self, "modulus", mod)
        if self.e > 1:
            from drinfeldlab.algebra.factor import is_irreducible

            prime = finite_field(FqConfig(self.p))
            if not is_irreducible(_upoly.UPoly(prime, mod, "x")):
                raise DomainError(f"modulus {list(mod)} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p ** self.e

    @classmethod
    def of_order(cls, q: int) -> "FqConfig":
        """F_q with the lexicographically first irreducible monic modulus."""
        p = next((d for d in range(2, q + 1) if q % d == 0), None)
        if p is None:
            raise DomainError(f"{q} is not a prime power")
        e, rest = 0, q
        while rest % p == 0:
            rest //= p
            e += 1
        if rest != 1:
            raise DomainError(f"{q} is not a prime power")
        if e == 1:
            return cls(p)
        from itertools import product

        from drinfeldlab.algebra.factor import is_irreducible

        prime = finite_field(cls(p))
        for lower in product(range(p), repeat=e):
            mod = tuple(reversed(lower)) + (1,)
            if mod[0] and is_irreducible(_upoly.UPoly(prime, mod, "x")):
                return cls(p, e, mod)
        raise DomainError(f"no irreducible modulus of degree {e} over F_{p}")  # pragma: no cover


class FiniteField:
    """Arithmetic on raw int encodings of F_q elements."""

    is_finite = True

    def __init__(self, config: FqConfig) -> None:
        self.config = config
        self.p = config.p
        self.e = config.e
        self.q = config.q
        self.zero = 0
        self.one = 1
        self._exp: List[int] = []
        self._log: List[int] = []
        if self.e > 1:
            self._build_tables()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and other.config == self.config

    def __hash__(self) -> int:
        return hash(("FiniteField", self.config))

    def __repr__(self) -> str:
        return f"GF({self.q})"

    # -- encoding -----------------------------------------------------------
    def digits(self, a: int) -> List[int]:
        out = []
        for _ in range(self.e):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        if len(digits) > self.e:
            raise DomainError(f"element of F_{self.q} has at most {self.e} coordinates")
        value = 0
        for d in reversed(list(digits)):
            value = value * self.p + int(d) % self.p
        return value

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    def key(self, a: int) -> int:
        return a

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def random_element(self, rng: random.Random, nonzero: bool = False) -> int:
        return rng.randrange(1 if nonzero else 0, self.q)

    # -- extension field tables -----------------------------------------------
    def _slow_mul(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        mod = self.config.modulus
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            if c:
                for j in range(e + 1):
                    prod[k - e + j] = (prod[k - e + j] - c * mod[j]) % p
        return self.from_digits(prod[:e])

    def _build_tables(self) -> None:
        q = self.q
        for g in range(2, q):
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = self._slow_mul(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                log = [0] * q
                for i, v in enumerate(exp):
                    log[v] = i
                self._exp, self._log = exp, log
                return
        # q = 2^1 etc. never reach here since e > 1
        raise DomainError("no primitive element found")  # pragma: no cover

    # -- ring operations --------------------------------------------------------
    def is_zero(self, a: int) -> bool:
        return a == 0

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        da, db = self.digits(a), self.digits(b)
        return self.from_digits([(x + y) % self.p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.from_digits([(-x) % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.e == 1:
            return a * b % self.p
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZeroError(f"inverse of zero in F_{self.q}")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if n == 0:
            return 1
        if a == 0:
            return 0
        # the multiplicative group has order q - 1
        n %= self.q - 1
        if n == 0:
            return 1
        if self.e == 1:
            return pow(a, n, self.p)
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frob(self, a: int) -> int:
        """x -> x^q, the identity on F_q."""
        return a

    def pth_root(self, a: int) -> int:
        return self.pow(a, self.q // self.p)

    # -- polynomial kernels ---------------------------------------------------
    def poly_mul(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        if not a or not b:
            return ()
        if self.e == 1 and min(len(a), len(b)) > 24:
            return _kronecker_mul(a, b, self.p)
        return _upoly.mul_generic(self, a, b)

    def poly_divmod(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        if self.q == 2 and len(a) > 24:
            qi, ri = _gf2_divmod(_gf2_pack(a), _gf2_pack(b))
            return _gf2_unpack(qi), _gf2_unpack(ri)
        if self.e == 1:
            return _prime_divmod(a, b, self.p)
        return _upoly.divmod_generic(self, a, b)

    def poly_gcd(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        """Monic gcd of two coefficient tuples."""
        if self.q == 2:
            return _gf2_unpack(_gf2_gcd(_gf2_pack(a), _gf2_pack(b)))
        return _upoly.gcd_generic(self, a, b)


@lru_cache(maxsize=None)
def finite_field(config: FqConfig) -> FiniteField:
    """Shared `FiniteField` per config; tables are built once."""
    return FiniteField(config)


def prime_field(p: int) -> FiniteField:
    return finite_field(FqConfig(p))


# -- kernels ----------------------------------------------------------------------

def _kronecker_mul(a: Tuple[int, ...], b: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    """Multiply over F_p by packing coefficients into one big int (hex slots)."""
    bound = (p - 1) * (p - 1) * min(len(a), len(b))
    width = max(1, (bound.bit_length() + 3) // 4)
    fmt = f"0{width}x"
    ia = int("".join(format(c, fmt) for c in reversed(a)), 16)
    ib = int("".join(format(c, fmt) for c in reversed(b)), 16)
    n = len(a) + len(b) - 1
    s = format(ia * ib, "x").rjust(n * width, "0")
    out = [int(s[i:i + width], 16) % p for i in range(0, n * width, width)]
    out.reverse()
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _prime_divmod(a: Tuple[int, ...], b: Tuple[int, ...], p: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    db = len(b) - 1
    if len(a) <= db:
        return (), a
    r = list(a)
    inv_lc = pow(b[-1], p - 2, p)
    quot = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i] * inv_lc % p
        if c:
            quot[i - db] = c
            off = i - db
            for j in range(db + 1):
                if b[j]:
                    r[off + j] = (r[off + j] - c * b[j]) % p
    rem = r[:db]
    while rem and rem[-1] == 0:
        rem.pop()
    while quot and quot[-1] == 0:
        quot.pop()
    return tuple(quot), tuple(rem)


def _gf2_pack(a: Tuple[int, ...]) -> int:
    if not a:
        return 0
    return int("".join("1" if c else "0" for c in reversed(a)), 2)


def _gf2_unpack(x: int) -> Tuple[int, ...]:
    if x == 0:
        return ()
    return tuple(int(ch) for ch in reversed(bin(x)[2:]))


def _gf2_divmod(a: int, b: int) -> Tuple[int, int]:
    if b == 0:
        raise DivisionByZeroError("polynomial division by zero")
    db = b.bit_length()
    quot = 0
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        quot |= 1 << shift
        a ^= b << shift
    return quot, a


def _gf2_gcd(a: int, b: int) -> int:
    while b:
        db = b.bit_length()
        while a.bit_length() >= db:
            a ^= b << (a.bit_length() - db)
        a, b = b, a
    return a


@dataclass(frozen=True)
class FqElem:
    """User-facing F_q element with operator support."""
    value: int
    field: FiniteField

    @classmethod
    def of(cls, fq: FiniteField, coords: Sequence[int]) -> "FqElem":
        return cls(fq.from_digits(coords), fq)

    @property
    def coeffs(self) -> List[int]:
        return self.field.digits(self.value)

    def _other(self, other: "FqElem") -> int:
        if not isinstance(other, FqElem) or other.field != self.field:
            raise FieldMismatchError("operands belong to different finite fields")
        return other.value

    def __add__(self, other: "FqElem") -> "FqElem":
        return FqElem(self.field.add(self.value, self._other(other)), self.field)

    def __sub__(self, other: "FqElem") -> "FqElem":
        return FqElem(self.field.sub(self.value, self._other(other)), self.field)

    def __mul__(self, other: "FqElem") -> "FqElem":
        return FqElem(self.field.mul(self.value, self._other(other)), self.field)

    def __truediv__(self, other: "FqElem") -> "FqElem":
        return FqElem(self.field.div(self.value, self._other(other)), self.field)

    def __neg__(self) -> "FqElem":
        return FqElem(self.field.neg(self.value), self.field)

    def __pow__(self, n: int) -> "FqElem":
        return FqElem(self.field.pow(self.value, n), self.field)

    def inverse(self) -> "FqElem":
        return FqElem(self.field.inv(self.value), self.field)

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self) -> str:
        return f"FqElem({self.coeffs}, q={self.field.q})"


def field_arith(a: FqElem, b, op: str) -> FqElem:
    """Apply one of add/mul/inv/pow.

    `inv` inverts `b` (so `a` only fixes the field); `pow` takes an int
    exponent in `b`.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        a._other(b)
        return b.inverse()
    if op == "pow":
        return a ** int(b)
    raise DomainError(f"unknown field operation {op!r}")
