"""Configuration utilities for DrinfeldLab.

Loads defaults, merges an optional YAML/JSON config file, and applies
environment variable overrides. Only computational budgets live here: the
field, the module and the seeds always come from the instance file or explicit
flags, so a report never depends on a forgotten config file for its meaning.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Type, TypeVar, Union

from drinfeldlab.utils.errors import SchemaError

try:
    import yaml  # type: ignore
except Exception:  # pragma: no cover - optional dependency
    yaml = None

_PARSE_ERRORS: Tuple[type, ...] = (ValueError,) + ((yaml.YAMLError,) if yaml is not None else ())

T = TypeVar("T")


@dataclass
class HeightsConfig:
    """Budgets for canonical height evaluation.

    - tol_exponent: default Method A tolerance is q^-tol_exponent.
    - n_max: iteration count for local Green's functions.
    - max_degree: largest iterate degree computed exactly; orbits that would
      exceed it stop early and return a wider (still certified) interval.
    """
    tol_exponent: int = 6
    n_max: int = 8
    max_degree: int = 4096

    def default_tol(self, q: int) -> Fraction:
        return Fraction(1, q ** self.tol_exponent)


@dataclass
class ScanConfig:
    """Scan and enumeration limits."""
    workers: int = 1
    torsion_guard: int = 20000
    annihilator_degree: int = 4
    lowernorthcott_degree: int = 2
    point_height: int = 3
    enumeration_guard: int = 200000


@dataclass
class LoggingConfig:
    """Logging level configuration."""
    level: str = "INFO"
    file_path: Optional[str] = None


@dataclass
class AppConfig:
    """Aggregated application configuration tree."""
    heights: HeightsConfig = field(default_factory=HeightsConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


DISCOVERY_NAMES = ("drinfeldlab.yaml", "drinfeldlab.yml", "drinfeldlab.json")

_ENV_KEYS: Dict[str, Tuple[str, str, Callable[[str], object]]] = {
    "DRINFELDLAB_TOL_EXPONENT": ("heights", "tol_exponent", int),
    "DRINFELDLAB_N_MAX": ("heights", "n_max", int),
    "DRINFELDLAB_MAX_DEGREE": ("heights", "max_degree", int),
    "DRINFELDLAB_WORKERS": ("scan", "workers", int),
    "DRINFELDLAB_LOG_LEVEL": ("logging", "level", str),
    "DRINFELDLAB_LOG_FILE": ("logging", "file_path", str),
}


def _load_from_path(path: Path) -> Dict[str, object]:
    """Parse a YAML or JSON config file; a missing file is an empty config.

    Files without a telling suffix are read as YAML, which accepts JSON too.
    """
    if not path.exists():
        return {}
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() == ".json" or yaml is None:
            data = json.loads(text or "{}")
        else:
            data = yaml.safe_load(text) or {}
    except _PARSE_ERRORS as exc:
        raise SchemaError(f"cannot parse config file: {exc}", str(path)) from exc
    if not isinstance(data, dict):
        raise SchemaError("config file must hold a mapping", str(path))
    return data


def _merge_dict(base: Dict[str, object], override: Dict[str, object]) -> Dict[str, object]:
    """Deep-merge two dicts with override precedence.

    Only recurses into nested dicts; lists and scalars are replaced.
    """
    result = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(result.get(k), dict):
            result[k] = _merge_dict(result[k], v)  # type: ignore[index]
        else:
            result[k] = v
    return result


def _discover(config_path: Optional[Union[str, Path]]) -> Optional[Path]:
    if config_path:
        return Path(config_path)
    return next((p for p in map(Path, DISCOVERY_NAMES) if p.exists()), None)


def _env_overrides() -> Dict[str, Dict[str, object]]:
    out: Dict[str, Dict[str, object]] = {}
    for env_name, (section, key, convert) in _ENV_KEYS.items():
        raw = os.getenv(env_name)
        if not raw:
            continue
        try:
            out.setdefault(section, {})[key] = convert(raw)
        except ValueError as exc:
            raise SchemaError(f"bad value {raw!r}", env_name) from exc
    return out


def _section(cls: Type[T], name: str, values: object) -> T:
    if not isinstance(values, dict):
        raise SchemaError("expected a mapping", name)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise SchemaError(f"unknown key(s) {', '.join(map(str, unknown))}", name)
    return cls(**values)


def load_config(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Dict[str, object]]] = None,
) -> AppConfig:
    """Load application config.

    Precedence (lowest to highest):
      1) built-in defaults
      2) discovered config file (yaml/json)
      3) environment variables
      4) explicit overrides (CLI flags); `None` values are ignored
    """
    path = _discover(config_path)
    data: Dict[str, object] = _load_from_path(path) if path else {}
    data = _merge_dict(data, _env_overrides())  # type: ignore[arg-type]
    for section, values in (overrides or {}).items():
        data = _merge_dict(data, {section: {k: v for k, v in values.items() if v is not None}})

    return AppConfig(
        heights=_section(HeightsConfig, "heights", data.get("heights", {})),
        scan=_section(ScanConfig, "scan", data.get("scan", {})),
        logging=_section(LoggingConfig, "logging", data.get("logging", {})),
    )
