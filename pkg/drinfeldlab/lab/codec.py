"""Wire formats for reports and instance files.

- F_q elements: an int for prime fields, a list of e ints mod p otherwise.
- Polynomials: coefficient arrays, lowest degree first. Over the tower the
  coefficients are themselves encoded elements of F_q(T).
- Rational functions: {"num": [...], "den": [...]}; a bare array is a polynomial.
- Places: {"kind": "infinity"} or {"kind": "finite", "poly": [...]}.
- Factored elements: {"unit": <F_q(T) element>, "factors": [{"poly": [...], "exp": n}]}.
- Rationals: "a/b" strings, integers as "a".

Reports are serialized with orjson, sorted keys and two-space indent, so equal
inputs give byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import orjson

from drinfeldlab.algebra.ratfunc import FunctionField, RatFunc
from drinfeldlab.algebra.upoly import UPoly
from drinfeldlab.fields.places import INFINITY, FactoredRatFunc, FieldDescriptor, Place
from drinfeldlab.heights.interval import format_rational, parse_rational
from drinfeldlab.utils.errors import SchemaError

__all__ = [
    "format_rational",
    "parse_rational",
    "encode_fq",
    "decode_fq",
    "encode_upoly",
    "decode_upoly",
    "encode_ratfunc",
    "decode_ratfunc",
    "encode_place",
    "decode_place",
    "encode_factored",
    "decode_factored",
    "encode_module",
    "encode_divisor",
    "dumps",
    "write_json",
]


def encode_fq(fq: Any, value: int) -> Union[int, List[int]]:
    return value if fq.e == 1 else fq.digits(value)


def decode_fq(fq: Any, data: Any) -> int:
    if isinstance(data, bool):
        raise SchemaError("expected an integer or an integer vector")
    if isinstance(data, int):
        if fq.e == 1:
            return data % fq.p
        return fq.from_digits([data])
    if isinstance(data, (list, tuple)):
        return fq.from_digits([int(d) for d in data])
    raise SchemaError(f"cannot read {data!r} as an element of F_{fq.q}")


def _encode_coeff(domain: Any, c: Any) -> Any:
    if getattr(domain, "is_finite", False):
        return encode_fq(domain, c)
    return encode_ratfunc(c)


def _decode_coeff(domain: Any, data: Any) -> Any:
    if getattr(domain, "is_finite", False):
        return decode_fq(domain, data)
    return decode_ratfunc(domain, data)


def encode_upoly(f: UPoly) -> List[Any]:
    return [_encode_coeff(f.domain, c) for c in f.coeffs]


def decode_upoly(domain: Any, data: Sequence[Any], var: str = "T") -> UPoly:
    if not isinstance(data, (list, tuple)):
        raise SchemaError("a polynomial is a coefficient array, lowest degree first")
    return UPoly(domain, tuple(_decode_coeff(domain, c) for c in data), var)


def encode_ratfunc(x: RatFunc) -> Dict[str, Any]:
    return {"num": encode_upoly(x.num), "den": encode_upoly(x.den)}


def decode_ratfunc(fld: FunctionField, data: Any) -> RatFunc:
    if isinstance(data, (list, tuple)):
        return RatFunc.from_poly(decode_upoly(fld.base, data, fld.var))
    if isinstance(data, int) and not isinstance(data, bool):
        return RatFunc.from_poly(decode_upoly(fld.base, [data], fld.var))
    if not isinstance(data, dict) or "num" not in data:
        raise SchemaError(f"cannot read {data!r} as a rational function")
    num = decode_upoly(fld.base, data["num"], fld.var)
    den = decode_upoly(fld.base, data.get("den", [1]), fld.var)
    if den.is_zero():
        raise SchemaError("denominator is zero", path="den")
    return RatFunc.make(num, den)


def encode_place(v: Place) -> Dict[str, Any]:
    if v.is_infinity:
        return {"kind": "infinity"}
    return {"kind": "finite", "poly": encode_upoly(v.poly)}


def decode_place(desc: FieldDescriptor, data: Dict[str, Any]) -> Place:
    kind = data.get("kind")
    if kind == "infinity":
        return INFINITY
    if kind != "finite":
        raise SchemaError(f"unknown place kind {kind!r}", path="kind")
    fld = desc.field
    return Place.finite(decode_upoly(fld.base, data.get("poly", []), fld.var))


def encode_factored(x: FactoredRatFunc) -> Dict[str, Any]:
    return {
        "unit": encode_ratfunc(x.unit),
        "factors": [{"poly": encode_upoly(P), "exp": e} for P, e in x.factors],
    }


def decode_factored(desc: FieldDescriptor, data: Dict[str, Any]) -> FactoredRatFunc:
    fld = desc.field
    unit = decode_ratfunc(fld, data.get("unit", [1]))
    if not unit.is_constant():
        raise SchemaError("the unit of a factored element must be constant", path="unit")
    factors = []
    for i, item in enumerate(data.get("factors", [])):
        poly = decode_upoly(fld.base, item["poly"], fld.var)
        if poly.degree < 1 or not poly.is_monic():
            raise SchemaError("factors must be monic of positive degree", path=f"factors.{i}.poly")
        factors.append((poly, int(item.get("exp", 1))))
    return FactoredRatFunc(unit, tuple(factors))


def encode_module(M: Any) -> Dict[str, Any]:
    return {
        "field": M.descriptor.to_dict(),
        "q": M.q,
        "rank": M.rank,
        "phi_T": [encode_ratfunc(a) for a in M.coeffs],
    }


def encode_divisor(D: Any) -> List[Dict[str, Any]]:
    return [{"place": encode_place(v), "coeff": format_rational(c)} for v, c in D.terms]


def dumps(payload: Any) -> bytes:
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(payload))
    return path
