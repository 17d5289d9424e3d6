import importlib
import json
import logging
from fractions import Fraction
from pathlib import Path

import pytest

from drinfeldlab.utils.config import AppConfig, load_config
from drinfeldlab.utils.errors import SchemaError
from drinfeldlab.utils.logging import LOGGER_NAME, get_logger


def test_defaults(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = load_config()
    assert cfg == AppConfig()
    assert cfg.heights.default_tol(2) == Fraction(1, 64)
    assert cfg.scan.torsion_guard == 20000
    assert cfg.to_dict()["scan"]["workers"] == 1


def test_yaml_file_is_discovered(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "drinfeldlab.yaml").write_text("heights:\n  n_max: 5\nscan:\n  point_height: 1\n", encoding="utf-8")
    cfg = load_config()
    assert cfg.heights.n_max == 5
    assert cfg.scan.point_height == 1
    assert cfg.heights.max_degree == 4096


def test_json_file_and_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = tmp_path / "budget.json"
    path.write_text(json.dumps({"scan": {"workers": 2}, "heights": {"tol_exponent": 3}}), encoding="utf-8")
    monkeypatch.setenv("DRINFELDLAB_WORKERS", "3")
    monkeypatch.setenv("DRINFELDLAB_LOG_LEVEL", "DEBUG")
    cfg = load_config(path, overrides={"scan": {"workers": 4}, "logging": {"level": None}})
    assert cfg.scan.workers == 4
    assert cfg.heights.default_tol(3) == Fraction(1, 27)
    assert cfg.logging.level == "DEBUG"


def test_missing_config_file_falls_back_to_defaults(tmp_path):
    assert load_config(tmp_path / "absent.yaml") == AppConfig()


def test_logger_is_shared_and_relevelled():
    logger = get_logger("WARNING")
    assert logger.name == LOGGER_NAME
    assert get_logger() is logger
    assert logger.level == logging.WARNING
    get_logger("debug")
    assert logger.level == logging.DEBUG
    assert not logger.propagate


def test_bad_config_is_a_schema_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    typo = tmp_path / "typo.yaml"
    typo.write_text("scan:\n  torsion_gaurd: 5\n", encoding="utf-8")
    with pytest.raises(SchemaError) as info:
        load_config(typo)
    assert info.value.path == "scan"
    listed = tmp_path / "listed.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_config(listed)
    monkeypatch.setenv("DRINFELDLAB_N_MAX", "eight")
    with pytest.raises(SchemaError) as info:
        load_config()
    assert info.value.path == "DRINFELDLAB_N_MAX"


def test_log_file_handler(tmp_path):
    logger = logging.getLogger(LOGGER_NAME)
    saved = list(logger.handlers)
    for handler in saved:
        logger.removeHandler(handler)
    try:
        path = tmp_path / "logs" / "run.log"
        get_logger("INFO", str(path))
        get_logger().info("hello from the scan")
        for handler in logger.handlers:
            handler.flush()
        assert "| INFO | drinfeldlab | hello from the scan" in path.read_text(encoding="utf-8")
    finally:
        for handler in list(logger.handlers):
            handler.close()
            logger.removeHandler(handler)
        for handler in saved:
            logger.addHandler(handler)


PACKAGE_ROOT = Path(__file__).resolve().parents[1] / "drinfeldlab"
MODULES = sorted(
    ".".join(part for part in path.relative_to(PACKAGE_ROOT.parent).with_suffix("").parts if part != "__init__")
    for path in PACKAGE_ROOT.rglob("*.py")
)


@pytest.mark.parametrize("name", MODULES)
def test_every_module_has_a_docstring(name):
    assert importlib.import_module(name).__doc__
