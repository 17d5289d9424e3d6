from fractions import Fraction
from pathlib import Path

import orjson
import pytest

import drinfeldlab.lab.experiments as experiments
from drinfeldlab.algebra.fq import FqConfig
from drinfeldlab.drinfeld.module import DrinfeldModule
from drinfeldlab.fields.places import FieldDescriptor
from drinfeldlab.heights.checks import CheckOutcome
from drinfeldlab.heights.interval import HeightInterval
from drinfeldlab.lab.codec import dumps, encode_ratfunc
from drinfeldlab.lab.experiments import (
    cmd_enumerate_modules,
    cmd_height,
    cmd_scan_jplaces,
    cmd_scan_zimmer,
    cmd_torsion,
    pool_map,
)
from drinfeldlab.lab.family import cmd_family, least_squares_slope, specialize, specialize_module
from drinfeldlab.lab.schema import instance_blob, load_instance, parse_instance
from drinfeldlab.reporting.generator import generate_reports, render_text
from drinfeldlab.utils.config import AppConfig, ScanConfig
from drinfeldlab.utils.errors import ResourceGuardError, SchemaError

INSTANCES = Path(__file__).resolve().parents[1] / "instances"

BASE2 = FieldDescriptor.base_rational(FqConfig(2))
F = BASE2.field
T = F.gen()
ONE = F.one

FIELD = {"instance": "base", "p": 2, "e": 1, "modulus": []}
TOWER = {"instance": "tower", "p": 2, "e": 1, "modulus": []}
U = {"factored": {"unit": 1, "factors": [{"poly": [0, 1], "exp": 1}]}}


def family_payload(phi_T, specializations, points=([1],)):
    return {
        "field": TOWER,
        "module": {"phi_T": phi_T},
        "points": list(points),
        "experiment": {"tol": "1/4", "nMax": 6},
        "family": {"specializations": specializations},
    }


# -- schema ---------------------------------------------------------------------------


def test_instance_files_load():
    carlitz = load_instance(INSTANCES / "carlitz_q2.json")
    assert carlitz.module == DrinfeldModule.carlitz(BASE2)
    assert carlitz.points[0] == T ** 2
    assert carlitz.tol == Fraction(1, 64)
    family = load_instance(INSTANCES / "family_u.json")
    assert family.descriptor.is_tower
    assert len(family.specializations) == 10
    assert family.specializations[1] == T ** 2


@pytest.mark.parametrize(
    "payload, path",
    [
        ({"field": {"p": 4}, "points": []}, "field"),
        ({"field": FIELD, "experiment": {"tol": "-1"}}, "experiment.tol"),
        ({"field": FIELD, "experiment": {"tol": "1/0"}}, "experiment.tol"),
        ({"field": FIELD, "module": {"phi_T": [[1], [0]]}}, "module.phi_T"),
        ({"field": FIELD, "points": [{"num": [1], "den": [0]}]}, "points.0"),
        ({"field": FIELD, "points": ["T"]}, "points.0"),
        ({"field": FIELD, "surprise": 1}, "surprise"),
        ({"field": FIELD, "experiment": {"count": 0}}, "experiment.count"),
        ({"field": FIELD, "experiment": {"conjugator": [0]}}, "experiment.conjugator"),
    ],
)
def test_schema_errors_carry_a_path(payload, path):
    with pytest.raises(SchemaError) as info:
        parse_instance(payload)
    assert info.value.path.startswith(path)


def test_invalid_json_is_a_schema_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_instance(bad)
    listed = tmp_path / "list.json"
    listed.write_text("[]", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_instance(listed)


def test_instance_blob_replays(tmp_path):
    M = DrinfeldModule(BASE2, (T + ONE, T.inverse()))
    points = [T ** 3, ONE / (T + ONE)]
    path = tmp_path / "replay.json"
    path.write_bytes(dumps(instance_blob(M, points, {"seed": 3})))
    again = load_instance(path)
    assert again.module == M
    assert again.points == points
    assert again.experiment.seed == 3


def test_conjugator_is_decoded():
    instance = parse_instance({"field": FIELD, "experiment": {"conjugator": [1, 1]}})
    assert instance.conjugator == T + ONE
    assert parse_instance({"field": FIELD}).conjugator is None


# -- height / torsion -----------------------------------------------------------------


def test_height_command_on_carlitz():
    report = cmd_height(load_instance(INSTANCES / "carlitz_q2.json"))
    assert report.passed
    first = report.records[0]
    assert first["hHat"] == {"lo": "2", "hi": "2", "exact": True}
    assert first["naiveHeight"] == "2"
    assert report.records[1]["torsion"] is True
    assert report.summary["hPhi"] == "0"
    assert report.summary["points"] == 5


def test_height_command_on_rank2():
    report = cmd_height(load_instance(INSTANCES / "rank2_q2.json"))
    assert report.passed
    assert report.records[0]["torsion"] is True
    assert report.summary["hPhi"] == "2/3"
    assert report.summary["hJ"] == "1/3"


def test_height_command_needs_points():
    instance = parse_instance({"field": FIELD, "module": {"phi_T": [[1]]}})
    with pytest.raises(SchemaError):
        cmd_height(instance)


def test_torsion_command():
    report = cmd_torsion(load_instance(INSTANCES / "carlitz_q2.json"))
    assert report.passed and report.summary["closed"]
    by_point = {orjson.dumps(rec["point"]): rec["annihilator"] for rec in report.records}
    assert by_point[orjson.dumps(encode_ratfunc(T))] == [0, 1]
    assert by_point[orjson.dumps(encode_ratfunc(ONE))] == [0, 1, 1]
    assert report.summary["searchHeight"] == 2


def test_torsion_command_respects_the_guard():
    config = AppConfig(scan=ScanConfig(torsion_guard=1))
    with pytest.raises(ResourceGuardError):
        cmd_torsion(load_instance(INSTANCES / "carlitz_q2.json"), config)


# -- scans ----------------------------------------------------------------------------


def test_scan_zimmer_is_deterministic():
    first = cmd_scan_zimmer(seed=5, count=20, q=2, r=1, coeff_height_bound=2)
    second = cmd_scan_zimmer(seed=5, count=20, q=2, r=1, coeff_height_bound=2)
    assert dumps(first.to_dict()) == dumps(second.to_dict())
    assert first.passed
    assert first.summary["C1"] == "2" and first.summary["C2"] == "1"
    assert Fraction(first.summary["maxRatio"]) <= 1
    assert len(first.records) == 20


def test_scan_zimmer_rank2_passes():
    report = cmd_scan_zimmer(seed=2, count=6, q=2, r=2, coeff_height_bound=1, tol=Fraction(1, 4))
    assert report.passed
    assert report.summary["C1"] == "4/9"


def test_scan_zimmer_rejects_empty_scans():
    with pytest.raises(SchemaError):
        cmd_scan_zimmer(seed=1, count=0, q=2, r=1, coeff_height_bound=1)


def test_pool_map_keeps_order():
    assert pool_map(abs, [-3, 1, -2]) == [3, 1, 2]


def test_scan_jplaces_rank2():
    config = AppConfig(scan=ScanConfig(point_height=1))
    report = cmd_scan_jplaces(seed=7, q=2, r=2, s=1, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    assert report.passed
    assert report.summary["modules"] == 56
    assert Fraction(report.summary["epsilonHat"]) > 0
    target = {"num": [0, 1], "den": [1]}
    (record,) = [
        rec for rec in report.records
        if rec["module"]["phi_T"] == [{"num": [1], "den": [1]}, target]
    ]
    assert {"point": {"num": [1], "den": [1]}, "annihilator": [1, 1]} in record["torsion"]
    assert record["hJ"] == "1/3" and record["degMinDisc"] == "1/3"


def test_scan_jplaces_excludes_rank1_modules():
    config = AppConfig(scan=ScanConfig(point_height=1))
    report = cmd_scan_jplaces(seed=0, q=2, r=1, s=1, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    assert report.summary["excluded"] == report.summary["used"]
    assert report.summary["epsilonHat"] is None


def test_scan_jplaces_guard():
    config = AppConfig(scan=ScanConfig(point_height=1, enumeration_guard=10))
    with pytest.raises(ResourceGuardError):
        cmd_scan_jplaces(seed=0, q=2, r=2, s=1, enumeration_bound=1, config=config)


def test_scan_jplaces_order_does_not_depend_on_seed():
    config = AppConfig(scan=ScanConfig(point_height=1))
    a = cmd_scan_jplaces(seed=1, q=2, r=1, s=0, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    b = cmd_scan_jplaces(seed=9, q=2, r=1, s=0, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    assert a.records == b.records


def straddle_at_T(monkeypatch):
    """Make h_hat(T) on phi_T = T + tau + T tau^2 uncertifiable."""
    certified = experiments._certified_height

    def straddling(M, x, bounds, glob):
        if M.coeffs == (ONE, T) and x == T:
            return HeightInterval(Fraction(-1), Fraction(1))
        return certified(M, x, bounds, glob)

    monkeypatch.setattr(experiments, "_certified_height", straddling)


def test_jplaces_counterexample_names_the_failing_point(monkeypatch, tmp_path):
    straddle_at_T(monkeypatch)
    config = AppConfig(scan=ScanConfig(point_height=1))
    report = cmd_scan_jplaces(seed=7, q=2, r=2, s=1, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    assert not report.passed
    (counterexample,) = report.counterexamples
    assert counterexample["check"]["name"] == "jplacespositive"
    assert counterexample["instance"]["points"] == [encode_ratfunc(T)]

    path = tmp_path / "counterexample.json"
    path.write_bytes(dumps(counterexample["instance"]))
    replay = cmd_height(load_instance(path))
    assert "jplacespositive" in {c["check"]["name"] for c in replay.counterexamples}


def test_module_level_counterexamples_replay(monkeypatch, tmp_path):
    def failing_sandwich(M, v):
        return CheckOutcome("discsandwich", True, False, Fraction(1), Fraction(0), v)

    monkeypatch.setattr(experiments, "check_disc_sandwich", failing_sandwich)
    config = AppConfig(scan=ScanConfig(point_height=1))
    report = cmd_scan_jplaces(seed=7, q=2, r=2, s=1, enumeration_bound=1, config=config, tol=Fraction(1, 4))
    flagged = [c for c in report.counterexamples if c["check"]["name"] == "discsandwich"]
    assert flagged
    blob = flagged[0]["instance"]
    assert blob["experiment"]["conjugator"] == encode_ratfunc(T)

    path = tmp_path / "module.json"
    path.write_bytes(dumps(blob))
    replay = cmd_height(load_instance(path))
    assert "discsandwich" in {c["check"]["name"] for c in replay.counterexamples}
    assert replay.summary["moduleChecks"] > 0


def test_zimmer_counterexample_keeps_both_points(monkeypatch, tmp_path):
    def failing_ultrametric(M, v, x, y, n_max=8):
        return CheckOutcome("greenultrametric", True, False, Fraction(1), Fraction(0), v)

    monkeypatch.setattr(experiments, "check_green_ultrametric", failing_ultrametric)
    report = cmd_scan_zimmer(seed=5, count=2, q=2, r=1, coeff_height_bound=2)
    (first, *_) = report.counterexamples
    assert first["check"]["name"] == "greenultrametric"
    record = report.records[0]
    assert first["instance"]["points"] == [record["point"], record["partner"]]

    path = tmp_path / "pair.json"
    path.write_bytes(dumps(first["instance"]))
    replay = cmd_height(load_instance(path))
    assert "greenultrametric" in {c["check"]["name"] for c in replay.counterexamples}


def test_height_command_runs_module_checks():
    report = cmd_height(load_instance(INSTANCES / "rank2_q2.json"))
    names = {check["name"] for record in report.records for check in record["checks"]}
    assert {"greenfunctional", "lambdafunctional"} <= names
    assert "jplacespositive" in names
    assert report.summary["moduleChecks"] >= 2


# -- enumerate ------------------------------------------------------------------------


def test_enumerate_small_bounds():
    assert cmd_enumerate_modules(2, 1, Fraction(0)).summary["classes"] == 1
    rank2 = cmd_enumerate_modules(2, 2, Fraction(0))
    assert rank2.summary == {"classes": 2, "candidates": 2}


def test_enumerate_is_monotone_and_seed_stable():
    small = cmd_enumerate_modules(2, 1, Fraction(1))
    large = cmd_enumerate_modules(2, 1, Fraction(2))
    assert small.summary["classes"] <= large.summary["classes"]
    assert cmd_enumerate_modules(2, 1, Fraction(2), seed=4).records == large.records
    assert all(Fraction(rec["hPhi"]) <= 1 for rec in small.records)


# -- family ---------------------------------------------------------------------------


def test_specialization_helpers():
    family = parse_instance(family_payload([U], [[0, 1]]))
    fibre = specialize_module(family.module, T ** 2)
    assert fibre == DrinfeldModule(BASE2, (T ** 2,))
    assert specialize(family.points[0], T) == ONE
    assert specialize_module(family.module, F.zero) is None
    assert least_squares_slope([(Fraction(1), Fraction(2))]) is None
    assert least_squares_slope([(Fraction(1), Fraction(2)), (Fraction(3), Fraction(6))]) == 2


def test_family_slope_is_exact_on_clean_fibres():
    report = cmd_family(parse_instance(family_payload([U], [[0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1]])))
    assert report.passed
    assert report.summary["slope"] == "1"
    assert [rec["hHat"]["lo"] for rec in report.records] == ["2", "3", "4"]
    assert report.summary["torsionFibres"] == 0


def test_family_flags_torsion_fibres():
    report = cmd_family(parse_instance(family_payload([U], [[0, 1], [0, 0, 1]])))
    assert report.records[0]["torsion"] is True
    assert report.summary["torsionFibres"] == 1
    assert report.summary["maxTorsionHeight"] == "1"


def test_isotrivial_family_has_zero_slope():
    report = cmd_family(parse_instance(family_payload([[[1]]], [[0, 1], [0, 0, 1], [1, 0, 1]])))
    assert report.summary["isotrivial"] is True
    assert report.summary["slope"] == "0"


def test_zero_section_has_zero_slope():
    report = cmd_family(parse_instance(family_payload([U], [[0, 1], [0, 0, 1]], points=[[0]])))
    assert report.summary["slope"] == "0"
    assert all(rec["torsion"] for rec in report.records)


def test_degenerate_fibres_are_skipped():
    report = cmd_family(parse_instance(family_payload([U], [[0], [0, 0, 1], [0, 0, 0, 1]])))
    assert report.summary["degenerate"] == [{"num": [], "den": [1]}]
    assert len(report.records) == 2


def test_family_needs_a_tower_module():
    with pytest.raises(SchemaError):
        cmd_family(load_instance(INSTANCES / "carlitz_q2.json"))


# -- reporting ------------------------------------------------------------------------


def test_reports_are_written(tmp_path):
    report = cmd_height(load_instance(INSTANCES / "carlitz_q2.json"))
    out = tmp_path / "reports" / "height.json"
    text = generate_reports(report, out)
    assert "DrinfeldLab report: height" in text
    assert "All checks passed." in text
    assert orjson.loads(out.read_bytes())["command"] == "height"
    assert (tmp_path / "reports" / "height.json.txt").read_text(encoding="utf-8") == text
    assert render_text(report) == text


# -- acceptance scale -----------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.parametrize("q, r", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_full_zimmer_scan(q, r):
    report = cmd_scan_zimmer(seed=1, count=500, q=q, r=r, coeff_height_bound=3 if r == 1 else 2)
    assert report.passed
    assert Fraction(report.summary["maxRatio"]) <= 1


@pytest.mark.slow
def test_family_instance_tracks_the_generic_height():
    report = cmd_family(load_instance(INSTANCES / "family_u.json"))
    assert report.passed
    assert Fraction(report.summary["relativeError"]) < Fraction(1, 10)


@pytest.mark.slow
def test_jplaces_lower_bound_at_acceptance_scale():
    report = cmd_scan_jplaces(seed=0, q=2, r=2, s=2, enumeration_bound=2, tol=Fraction(1, 4), point_height=3)
    assert report.passed
    assert Fraction(report.summary["epsilonHatLower"]) > 0
    for record in report.records:
        if "minRatioLower" in record:
            assert Fraction(record["minRatioLower"]) > 0
