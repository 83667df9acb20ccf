import json
import math

import pytest

from azpair import cli

QUICK = ["--samples", "3000", "--depth", "25"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_pairing_chebyshev(capsys):
    d = run_json(capsys, "pairing", "x^2 - 2", *QUICK)
    assert abs(d["value"] - 0.3231) <= d["error_radius"]
    assert d["schema"] == 1
    assert d["config"]["samples"] == 3000 and d["config"]["seed"] == 42


def test_pairing_power_map(capsys):
    d = run_json(capsys, "pairing", "x^2")
    assert abs(d["value"]) < 1e-9
    assert d["equality_case"] == "ProvenEqual"


def test_pairing_cross_check(capsys):
    d = run_json(capsys, "pairing", "x^2 + 5", "--cross-check")
    h = d["h_phi_zero"]["value"]
    assert d["value"] == h
    assert abs(d["estimator_b"][-1]["estimate"] - h) < 1e-3
    assert d["estimator_gap"] < 1e-3
    assert len(d["estimator_b"]) == 10


def test_pairing_is_byte_identical(capsys, monkeypatch):
    first = run(capsys, "pairing", "x^2 + 2x", *QUICK, "--seed", "9")
    second = run(capsys, "pairing", "x^2 + 2x", *QUICK, "--seed", "9")
    monkeypatch.setenv("AZPAIR_THREADS", "4")
    threaded = run(capsys, "pairing", "x^2 + 2x", *QUICK, "--seed", "9")
    assert first == second == threaded
    other = run(capsys, "pairing", "x^2 + 2x", *QUICK, "--seed", "10")
    assert other[1] != first[1]


@pytest.mark.parametrize(
    "poly,point,expected",
    [("x^2", "3", math.log(3)), ("x^2 - 1", "0", 0.0), ("x^2 + 5", "0", 0.8509922495127937), ("x^2", "inf", 0.0)],
)
def test_height(capsys, poly, point, expected):
    d = run_json(capsys, "height", poly, point)
    assert d["value"] == pytest.approx(expected, abs=1e-8)
    assert d["config"]["tol"] == 1e-8


def test_newton(capsys):
    d = run_json(capsys, "newton", "x^2 - 2", "2")
    assert d["slopes"] == [{"slope": "-1/2", "length": 2}]
    assert d["vertices"] == [[0, "1"], [2, "0"]]


def test_newton_csv(capsys):
    code, out, _ = run(capsys, "newton", "x^2 - 2", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["slope,length", "-1/2,2"]


def test_reduction_lists_support_primes(capsys):
    d = run_json(capsys, "reduction", "x^2 + x/6 + 5")
    tags = {p["place"]: p["method"] for p in d["places"]}
    assert set(tags) == {"inf", "2", "3", "5"}
    assert tags["5"] == "GoodReduction"
    assert tags["2"] == "NewtonPolygonSeries"


def test_constants(capsys):
    d = run_json(capsys, "constants")
    assert round(d["chebyshev_integral"], 4) == 0.3231
    assert round(d["L2_chi3"], 6) == 0.781302
    assert abs(d["chebyshev_from_L"] - d["chebyshev_integral"]) < 1e-7


def test_I(capsys):
    d = run_json(capsys, "I", "1", "1")
    assert round(d["I"], 4) == 0.3231


def test_text_format(capsys):
    code, out, _ = run(capsys, "I", "2", "1", "--format", "text")
    assert code == 0
    assert out.startswith("schema: 1\n")
    assert "I: " in out


def test_sample_csv(capsys):
    code, out, _ = run(capsys, "sample", "x^2 - 2", "--samples", "5", "--depth", "10", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "re,im" and len(lines) == 6


@pytest.mark.parametrize(
    "argv",
    [
        ["pairing", "x^^2"],
        ["pairing", "x + 1"],
        ["height", "x^2", "1/0"],
        ["newton", "x^2", "4"],
        ["pairing", "x^2", "--samples", "0"],
        ["pairing", "x^2", "--beta", "a/b"],
        ["pairing", "2x^2 + 1"],
        ["I", "0", "1"],
        ["bogus"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_computation_error_exits_3(capsys):
    code, out, err = run(capsys, "pairing", "x^2", "--beta", "0")
    assert code == 3
    assert "beta appears exceptional" in err


def test_help_exits_0(capsys):
    assert cli.main(["--help"]) == 0
