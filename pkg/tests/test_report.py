import json
import shutil
from fractions import Fraction
from pathlib import Path

import pytest

from superloops.report import Report, golden_diff, golden_file, serialize, write_golden
from superloops.superalg import Context, SuperPoly, VarSpec


@pytest.fixture
def report() -> Report:
    ctx = Context([VarSpec("x")])
    report = Report("radon w g;", timing=1.23456, path=Path("scripts/area.sl"))
    report.inputs["loop"] = "g"
    report.results["value"] = SuperPoly.variable(ctx, "x").scale(2)
    report.results["ratio"] = Fraction(1, 2)
    report.check("closed", True)
    return report


@pytest.fixture
def golden_dir(tmp_path: Path):
    path = tmp_path.joinpath("golden")

    yield path

    shutil.rmtree(path, ignore_errors=True)


def test_serialize():
    ctx = Context([VarSpec("x")])
    x = SuperPoly.variable(ctx, "x")

    assert serialize({(0, 1): [x, Fraction(3, 4)], "n": 2, "ok": None}) == {
        "0,1": ["x", "3/4"],
        "n": 2,
        "ok": None,
    }
    assert serialize((True, 1)) == [True, 1]


def test_passed_needs_every_check(report: Report):
    assert report.passed

    report.check("other", False, ["broken"])

    assert not report.passed
    assert report.checks[-1].details == ["broken"]


def test_no_checks_passes():
    assert Report("transgress a g;").passed


def test_to_json_is_deterministic(report: Report):
    text = report.to_json()

    assert text.endswith("}\n")
    assert json.loads(text) == {
        "command": "radon w g;",
        "inputs": {"loop": "g"},
        "results": {"ratio": "1/2", "value": str(report.results["value"])},
        "checks": [{"name": "closed", "passed": True, "details": []}],
        "passed": True,
    }
    assert list(json.loads(text)) == sorted(json.loads(text))
    assert report.to_json() == text


def test_timing_is_opt_in(report: Report):
    assert "timing" not in report.to_dict()
    assert report.to_dict(timing=True)["timing"] == 1.235
    assert "timing: 1.235s" in report.to_text(timing=True)
    assert "timing" not in report.to_text()


def test_timing_without_a_measurement():
    assert "timing" not in Report("check sl12;").to_dict(timing=True)


def test_to_text(report: Report):
    report.check("other", False, ["first", "second"])

    lines = report.to_text().splitlines()

    assert lines[0] == "command: radon w g;"
    assert lines[1:3] == ["inputs:", "  loop: g"]
    assert lines[3] == "results:"
    assert lines[-5:] == ["[PASS] closed", "[FAIL] other", "    first", "    second", "failed"]


def test_to_text_nests_mappings():
    report = Report("check exactness;")
    report.results["defects"] = {"0": {"1": 0}, "1": {}}

    lines = report.to_text().splitlines()

    assert lines[1:5] == ["results:", "  defects:", "    0:", "      1: 0"]
    assert lines[5] == "    1: {}"
    assert lines[-1] == "passed"


def test_golden_file():
    assert golden_file(Path("golden"), Path("scripts/area.sl")) == Path("golden/area.json")


def test_missing_golden_differs(report: Report, golden_dir: Path):
    diff = golden_diff(report, golden_dir)

    assert diff
    assert diff[0].startswith("---")


def test_written_golden_matches(report: Report, golden_dir: Path):
    target = write_golden(report, golden_dir)

    assert target == golden_dir.joinpath("area.json")
    assert target.read_text() == report.to_json()
    assert "timing" not in target.read_text()
    assert golden_diff(report, golden_dir) == []


def test_changed_results_show_in_the_diff(report: Report, golden_dir: Path):
    write_golden(report, golden_dir)
    report.results["ratio"] = Fraction(2, 3)

    diff = golden_diff(report, golden_dir)

    assert any('"1/2"' in line for line in diff if line.startswith("-"))
    assert any('"2/3"' in line for line in diff if line.startswith("+"))


def test_reports_without_a_path():
    report = Report("check sl12;")

    assert golden_diff(report, Path("golden")) == []
    with pytest.raises(ValueError, match="no script path"):
        write_golden(report, Path("golden"))
