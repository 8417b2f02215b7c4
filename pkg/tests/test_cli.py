import io
import json
import os

import pytest

from orlicz_kit.main import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, run_command


def _run(*argv):
    stream = io.StringIO()
    code = run_command(list(argv), stream=stream)
    output = stream.getvalue()
    return code, json.loads(output) if output else None


def test_young_eval(workdir):
    """A(t) for A = t^2"""
    code, result = _run("young", "eval", "--A", "powerlog:p=2", "--t", "0.5,3")
    assert code == EXIT_OK
    assert result["values"]["0.5"] == pytest.approx(0.25)
    assert result["values"]["3.0"] == pytest.approx(9.0)


def test_young_eval_outside_domain(workdir):
    """Negative arguments are a library error with a JSON message"""
    code, result = _run("young", "eval", "--A", "powerlog:p=2", "--t", "-1")
    assert code == EXIT_CHECK_FAILED
    assert result["error"] == "DomainError"


def test_sobolev_conjugate(workdir):
    """A_{n/s}(1) = 8/27 for A = t^2, n = 2, s = 1/2"""
    code, result = _run("target", "sobolev-conjugate", "--A", "powerlog:p=2", "--n", "2", "--s", "0.5", "--at", "1")
    assert code == EXIT_OK
    assert result["sobolev_conjugate"]["1.0"] == pytest.approx(8.0 / 27.0, rel=1e-5)


def test_luxemburg_norm(workdir):
    """||chi_(0,2)||_{L^2} = sqrt(2)"""
    code, result = _run("norm", "luxemburg", "--A", "powerlog:p=2", "--f", "chi:0,2")
    assert code == EXIT_OK
    assert result["value"] == pytest.approx(2.0 ** 0.5, rel=1e-6)


def test_invalid_smoothness_is_a_usage_error(workdir):
    """s outside (0, n) exits with the usage code"""
    code, result = _run("target", "hat", "--A", "powerlog:p=2", "--n", "2", "--s", "3", "--at", "1")
    assert code == EXIT_USAGE
    assert result is None


def test_unknown_command(workdir):
    """Unknown commands exit with the usage code"""
    code, _ = _run("transmogrify")
    assert code == EXIT_USAGE


def test_malformed_young_function(workdir):
    """A power-log form without p is rejected"""
    code, _ = _run("young", "eval", "--A", "powerlog:alpha=1", "--t", "1")
    assert code == EXIT_USAGE


def test_suite_list(workdir):
    """'suite list' names the suites"""
    code, result = _run("suite", "list")
    assert code == EXIT_OK
    assert "power-law" in result["suites"]


def test_unknown_suite(workdir):
    """Unknown suite names are usage errors"""
    code, _ = _run("suite", "no-such-suite")
    assert code == EXIT_USAGE


def test_suite_writes_reports(workdir):
    """A suite run writes the three artifacts to the output directory"""
    code, result = _run("--output-dir", "out", "--seed", "5", "suite", "power-law")
    assert code == EXIT_OK
    assert result["passed"] is True
    for name in ("report.json", "plots.csv", "trials.csv"):
        assert os.path.exists(os.path.join("out", name))
    with open(os.path.join("out", "report.json")) as handle:
        assert json.load(handle)["seed"] == 5
