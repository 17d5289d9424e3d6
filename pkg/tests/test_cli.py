from fractions import Fraction
from pathlib import Path

import orjson
import pytest

import drinfeldlab.lab.experiments as experiments
import drinfeldlab.main as cli_main
from drinfeldlab import __version__
from drinfeldlab.algebra.fq import FqConfig
from drinfeldlab.fields.places import FieldDescriptor
from drinfeldlab.heights.interval import HeightInterval
from drinfeldlab.lab.codec import dumps
from drinfeldlab.lab.experiments import ScanReport, cmd_scan_jplaces
from drinfeldlab.main import EXIT_GUARD, EXIT_OK, EXIT_SCHEMA, EXIT_VIOLATION, main
from drinfeldlab.utils.config import AppConfig, ScanConfig

INSTANCES = Path(__file__).resolve().parents[1] / "instances"
CARLITZ = str(INSTANCES / "carlitz_q2.json")


def test_height_command_writes_reports(tmp_path, capsys):
    out = tmp_path / "height.json"
    assert main(["height", "--instance", CARLITZ, "--out", str(out)]) == EXIT_OK
    payload = orjson.loads(out.read_bytes())
    assert payload["passed"] is True
    assert payload["records"][0]["hHat"]["exact"] is True
    assert (tmp_path / "height.json.txt").exists()
    assert "All checks passed." in capsys.readouterr().out


def test_instance_may_come_before_the_subcommand(tmp_path):
    assert main(["--instance", CARLITZ, "torsion", "--out", str(tmp_path / "t.json")]) == EXIT_OK


def test_reports_are_byte_identical(tmp_path):
    args = ["scan-zimmer", "--seed", "3", "--count", "8", "--bound", "2", "--q", "2", "--r", "1"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(first)]) == EXIT_OK
    assert main(args + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_flags_override_the_instance(tmp_path):
    out = tmp_path / "zimmer.json"
    code = main(["scan-zimmer", "--instance", str(INSTANCES / "zimmer_scan.json"), "--count", "4", "--out", str(out)])
    assert code == EXIT_OK
    params = orjson.loads(out.read_bytes())["parameters"]
    assert params["count"] == 4 and params["seed"] == 1 and params["bound"] == 3


def test_enumerate_flags(tmp_path):
    out = tmp_path / "enum.json"
    assert main(["enumerate", "--q", "2", "--r", "1", "--bound", "1/2", "--out", str(out)]) == EXIT_OK
    payload = orjson.loads(out.read_bytes())
    assert payload["parameters"]["bound"] == "1/2"
    assert payload["summary"]["classes"] >= 1


def test_family_command(tmp_path):
    instance = tmp_path / "family.json"
    instance.write_bytes(
        orjson.dumps(
            {
                "field": {"instance": "tower", "p": 2},
                "module": {"phi_T": [{"factored": {"unit": 1, "factors": [{"poly": [0, 1], "exp": 1}]}}]},
                "points": [[1]],
                "experiment": {"tol": "1/4", "nMax": 6},
                "family": {"specializations": [[0, 0, 1], [0, 0, 0, 1]]},
            }
        )
    )
    out = tmp_path / "family_report.json"
    assert main(["family", "--instance", str(instance), "--out", str(out)]) == EXIT_OK
    assert orjson.loads(out.read_bytes())["summary"]["slope"] == "1"


@pytest.mark.parametrize(
    "args",
    [
        ["height"],
        ["scan-zimmer", "--q", "2"],
        ["height", "--instance", CARLITZ, "--tol", "abc"],
        ["height", "--instance", CARLITZ, "--tol", "-1/2"],
        ["scan-zimmer", "--count", "0"],
        ["no-such-command"],
    ],
)
def test_schema_and_usage_errors_exit_4(args):
    assert main(args) == EXIT_SCHEMA


def test_bad_json_exits_4(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert main(["height", "--instance", str(bad)]) == EXIT_SCHEMA
    assert main(["height", "--instance", str(tmp_path / "missing.json")]) == EXIT_SCHEMA


def test_resource_guard_exits_3(tmp_path):
    config = tmp_path / "tight.yaml"
    config.write_text("scan:\n  torsion_guard: 1\n", encoding="utf-8")
    assert main(["--config", str(config), "torsion", "--instance", CARLITZ]) == EXIT_GUARD


def test_violation_exits_2(monkeypatch):
    def failing_height(instance, config, tol):
        report = ScanReport("height", {})
        report.counterexamples.append({"check": {"name": "heightdiff"}, "instance": {}})
        return report

    monkeypatch.setattr(cli_main, "cmd_height", failing_height)
    assert main(["height", "--instance", CARLITZ]) == EXIT_VIOLATION


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


@pytest.mark.slow
def test_shipped_jplaces_instance(tmp_path):
    out = tmp_path / "jplaces.json"
    code = main(["scan-jplaces", "--instance", str(INSTANCES / "jplaces_scan.json"), "--out", str(out)])
    assert code == EXIT_OK
    assert orjson.loads(out.read_bytes())["summary"]["epsilonHat"] is not None


def test_unknown_config_key_exits_with_schema_error(tmp_path):
    config = tmp_path / "typo.yaml"
    config.write_text("heights:\n  nmax: 3\n", encoding="utf-8")
    assert main(["--config", str(config), "height", "--instance", CARLITZ]) == EXIT_SCHEMA


def test_height_replays_a_scan_counterexample(monkeypatch, tmp_path):
    T = FieldDescriptor.base_rational(FqConfig(2)).field.gen()
    certified = experiments._certified_height

    def straddling(M, x, bounds, glob):
        if M.coeffs[-1] == T and x == T:
            return HeightInterval(Fraction(-1), Fraction(1))
        return certified(M, x, bounds, glob)

    monkeypatch.setattr(experiments, "_certified_height", straddling)
    config = AppConfig(scan=ScanConfig(point_height=1))
    report = cmd_scan_jplaces(seed=7, q=2, r=2, s=1, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    counterexample = report.counterexamples[0]
    path = tmp_path / "counterexample.json"
    path.write_bytes(dumps(counterexample["instance"]))
    out = tmp_path / "replay.json"
    assert main(["height", "--instance", str(path), "--out", str(out)]) == EXIT_VIOLATION
    replayed = orjson.loads(out.read_bytes())
    assert counterexample["check"]["name"] in {c["check"]["name"] for c in replayed["counterexamples"]}
