"""Instance files.

An instance is one self-describing JSON document:

    {
      "field": {"instance": "base", "p": 2, "e": 1, "modulus": []},
      "module": {"phi_T": [<a_1>, ..., <a_r>], "places": [<place>, ...]},
      "points": [<element>, ...],
      "experiment": {"seed": 1, "tol": "1/64", "nMax": 8, "conjugator": <element>},
      "family": {"specializations": [<F_q(T) element>, ...]}
    }

Coefficients and points use the codec formats; over the tower a coefficient
may also be {"factored": {...}} so its places are known without factoring.
`experiment.conjugator` is the beta used by the conjugation check when the
document replays a module-level counterexample; it defaults to T.
The document is validated with pydantic before anything is decoded, and every
failure surfaces as a `SchemaError` carrying the dotted path of the bad field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from drinfeldlab.algebra.fq import FqConfig
from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.drinfeld.module import DrinfeldModule
from drinfeldlab.fields.places import FieldDescriptor, Place, sort_places
from drinfeldlab.lab import codec
from drinfeldlab.utils.errors import DrinfeldLabError, SchemaError


class FieldModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instance: Literal["base", "tower"] = "base"
    p: int
    e: int = 1
    modulus: List[int] = Field(default_factory=list)


class ModuleModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    phi_T: List[Any] = Field(min_length=1)
    places: List[Dict[str, Any]] = Field(default_factory=list)


class ExperimentModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    seed: Optional[int] = Field(default=None, ge=0)
    tol: Optional[str] = None
    bound: Optional[int] = Field(default=None, ge=0)
    count: Optional[int] = Field(default=None, ge=1)
    rank: Optional[int] = Field(default=None, ge=1)
    s: Optional[int] = Field(default=None, ge=0)
    n_max: Optional[int] = Field(default=None, alias="nMax", ge=1)
    point_height: Optional[int] = Field(default=None, alias="pointHeight", ge=0)
    conjugator: Optional[Any] = None

    @field_validator("tol")
    @classmethod
    def _positive_rational(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        try:
            parsed = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
        if parsed <= 0:
            raise ValueError("tol must be positive")
        return value


class FamilyModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    specializations: List[Any] = Field(default_factory=list)


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    ground: FieldModel = Field(alias="field")
    module: Optional[ModuleModel] = None
    points: List[Any] = Field(default_factory=list)
    experiment: ExperimentModel = Field(default_factory=ExperimentModel)
    family: Optional[FamilyModel] = None


@dataclass
class Instance:
    """A decoded instance: exact objects ready for computation."""
    descriptor: FieldDescriptor
    module: Optional[DrinfeldModule]
    points: List[RatFunc] = field(default_factory=list)
    point_places: List[Place] = field(default_factory=list)
    experiment: ExperimentModel = field(default_factory=ExperimentModel)
    specializations: List[RatFunc] = field(default_factory=list)
    conjugator: Optional[RatFunc] = None

    @property
    def tol(self) -> Optional[Fraction]:
        return None if self.experiment.tol is None else Fraction(self.experiment.tol.strip())


def _path(loc: Sequence[Any]) -> str:
    return ".".join(str(part) for part in loc)


def _decode_element(desc: FieldDescriptor, data: Any, where: str, places: List[Place]) -> RatFunc:
    try:
        if isinstance(data, dict) and "factored" in data:
            factored = codec.decode_factored(desc, data["factored"])
            places.extend(v for v in factored.places() if not v.is_infinity)
            return factored.value
        return codec.decode_ratfunc(desc.field, data)
    except SchemaError as exc:
        raise SchemaError(exc.message, path=f"{where}.{exc.path}" if exc.path else where) from exc
    except (DrinfeldLabError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(str(exc), path=where) from exc


def decode_instance(doc: InstanceFile) -> Instance:
    g = doc.ground
    try:
        config = FqConfig(g.p, g.e, tuple(g.modulus))
    except DrinfeldLabError as exc:
        raise SchemaError(str(exc), path="field") from exc
    desc = FieldDescriptor(g.instance, config)

    module: Optional[DrinfeldModule] = None
    if doc.module is not None:
        hint: List[Place] = []
        coeffs = [
            _decode_element(desc, c, f"module.phi_T.{i}", hint) for i, c in enumerate(doc.module.phi_T)
        ]
        for i, p in enumerate(doc.module.places):
            try:
                hint.append(codec.decode_place(desc, p))
            except DrinfeldLabError as exc:
                raise SchemaError(str(exc), path=f"module.places.{i}") from exc
        try:
            module = DrinfeldModule(desc, tuple(coeffs), tuple(sort_places(hint)))
        except DrinfeldLabError as exc:
            raise SchemaError(str(exc), path="module.phi_T") from exc

    point_places: List[Place] = []
    points = [_decode_element(desc, x, f"points.{i}", point_places) for i, x in enumerate(doc.points)]

    conjugator: Optional[RatFunc] = None
    if doc.experiment.conjugator is not None:
        conjugator = _decode_element(desc, doc.experiment.conjugator, "experiment.conjugator", [])
        if conjugator.is_zero():
            raise SchemaError("the conjugator must be nonzero", path="experiment.conjugator")
    specs: List[RatFunc] = []
    if doc.family is not None:
        base = FieldDescriptor.base_rational(config)
        specs = [
            _decode_element(base, b, f"family.specializations.{i}", [])
            for i, b in enumerate(doc.family.specializations)
        ]
    return Instance(desc, module, points, sort_places(point_places), doc.experiment, specs, conjugator)


def parse_instance(payload: Dict[str, Any]) -> Instance:
    try:
        doc = InstanceFile.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(first["msg"], path=_path(first["loc"])) from exc
    return decode_instance(doc)


def load_instance(path: Path) -> Instance:
    try:
        payload = orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path="") from exc
    except OSError as exc:
        raise SchemaError(f"cannot read instance file: {exc}", path="") from exc
    if not isinstance(payload, dict):
        raise SchemaError("an instance file is a JSON object", path="")
    return parse_instance(payload)


def instance_blob(
    M: DrinfeldModule,
    points: Sequence[RatFunc] = (),
    experiment: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Serialize (M, points) as an instance document that `load_instance` reads back."""
    blob: Dict[str, Any] = {
        "field": M.descriptor.to_dict(),
        "module": {
            "phi_T": [codec.encode_ratfunc(a) for a in M.coeffs],
            "places": [codec.encode_place(v) for v in M.places_hint if not v.is_infinity],
        },
        "points": [codec.encode_ratfunc(x) for x in points],
    }
    if experiment:
        blob["experiment"] = experiment
    return blob
