import csv
import json

import pytest

from orlicz_kit.models.schemas import SuiteConfig
from orlicz_kit.services.suites import (
    CHECK_REFERENCES,
    REPORT_SCHEMA,
    SUITES,
    check_reference,
    export_report,
    run_suite,
)


@pytest.fixture
def quick_config():
    """Few trials on coarse grids"""
    return SuiteConfig(seed=3, trials=5, cells=16)


def test_suite_registry():
    """Every suite is registered under its command-line name"""
    assert {"power-law", "asymptotics", "hardy-down", "polya", "reflection", "bbm"} <= set(SUITES)
    with pytest.raises(KeyError):
        run_suite("no-such-suite")


def test_power_law_suite(quick_config):
    """Closed forms of both targets hold for A = t^2"""
    result = run_suite("power-law", quick_config)
    assert result.passed
    assert len(result.checks) == 2
    assert len(result.rows) == 14


@pytest.mark.parametrize("name", ["luxemburg-power", "hardy-littlewood", "hardy-down"])
def test_randomized_suites_pass(name, quick_config):
    """Randomized suites pass on a handful of trials"""
    result = run_suite(name, quick_config)
    assert result.checks
    assert result.passed


def test_young_inequality_in_conjugate_suite(quick_config):
    """No sampled pair violates Young's inequality"""
    result = run_suite("conjugate", quick_config)
    young = [c for c in result.checks if c.check_id == "young-inequality"]
    assert len(young) == 1 and young[0].passed


def test_same_seed_same_trials(quick_config, tmp_path):
    """Reports are byte-identical for the same configuration"""
    first = export_report([run_suite("luxemburg-power", quick_config)], str(tmp_path / "a"), quick_config)
    second = export_report([run_suite("luxemburg-power", quick_config)], str(tmp_path / "b"), quick_config)
    with open(first["trials.csv"], "rb") as a, open(second["trials.csv"], "rb") as b:
        assert a.read() == b.read()


def test_export_report(quick_config, tmp_path):
    """report.json carries the schema, the seed and one entry per suite"""
    paths = export_report([run_suite("power-law", quick_config)], str(tmp_path), quick_config)
    with open(paths["report.json"]) as handle:
        report = json.load(handle)
    assert report["schema"] == REPORT_SCHEMA
    assert report["seed"] == 3
    assert report["passed"] is True
    assert report["suites"][0]["suite"] == "power-law"
    assert report["suites"][0]["check_count"] == 2
    assert all(check["paper_ref"] for check in report["suites"][0]["checks"])
    with open(paths["trials.csv"]) as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 14
    assert rows[0]["suite"] == "power-law"


def test_export_empty_report(tmp_path):
    """No suites still gives a valid report"""
    paths = export_report([], str(tmp_path))
    with open(paths["report.json"]) as handle:
        report = json.load(handle)
    assert report["suites"] == []
    assert report["passed"] is True


def test_check_references():
    """Check ids resolve to the result they verify, including suffixed ids"""
    assert check_reference("hardy-littlewood-modular") == CHECK_REFERENCES["hardy-littlewood"]
    assert check_reference("slope-p2-a0") == CHECK_REFERENCES["slope"]
    assert check_reference("double-log-slope") == CHECK_REFERENCES["double-log-slope"]
    assert check_reference("no-such-check") == ""


@pytest.mark.parametrize("name", ["hardy-littlewood", "reflection"])
def test_every_check_names_its_result(name, quick_config):
    """run_suite fills the reference of every check"""
    result = run_suite(name, quick_config)
    assert result.checks
    assert all(check.paper_ref for check in result.checks)
