"""Command-line front end: exit codes, JSON shape and determinism."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from shrinker4.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main, run


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "shrinker4", *argv], capture_output=True, text=True, check=False)


def test_invariants_round_sphere():
    res = run(["invariants", "--metric", "round_s4", "--param", "r=2.449489743", "--nodes", "24", "--json"])
    assert res.exit_code == EXIT_OK
    assert res.report["chi"] == pytest.approx(2, abs=1e-4)
    assert res.report["tau"] == pytest.approx(0, abs=1e-4)
    assert res.report["matches_reference"] and res.report["verdict"] == "pass"


def test_invariants_refuses_non_compact():
    res = run(["invariants", "--metric", "gaussian_shrinker"])
    assert res.exit_code == EXIT_ERROR and res.report["error"] == "UnsupportedError"


def test_unknown_metric_is_an_error():
    res = run(["invariants", "--metric", "hyperbolic"])
    assert res.exit_code == EXIT_ERROR and res.report["error"] == "UnknownNameError"


def test_bad_param_is_usage_error():
    res = run(["invariants", "--metric", "round_s4", "--param", "r"])
    assert res.exit_code == EXIT_ERROR and res.report["error"] == "usage"


def test_soliton_check_gaussian():
    res = run(["soliton-check", "--metric", "gaussian_shrinker", "--rho", "0.5"])
    assert res.exit_code == EXIT_OK
    r = res.report
    assert r["residual_max"] < 1e-12 and r["identities"]["passed"]
    assert r["sufficient"] is None and "non-compact" in r["note"]


def test_soliton_check_sphere_runs_sufficient_chain():
    res = run(["soliton-check", "--metric", "round_s4", "--nodes", "8", "--samples", "50"])
    assert res.exit_code == EXIT_OK
    assert res.report["sufficient"]["implication_ok"]


def test_soliton_check_wrong_candidate_fails():
    res = run(["soliton-check", "--metric", "product_s2xs2", "--param", "b=1", "--rho", "0.5"])
    assert res.exit_code == EXIT_FAILED
    assert res.report["identities"]["trace"] == pytest.approx(1.0, abs=1e-9)
    assert res.report["verdict"] == "fail"


def test_soliton_check_expanding_constant():
    res = run(["soliton-check", "--metric", "round_s4", "--rho", "-1"])
    assert res.exit_code == EXIT_FAILED
    assert "not a shrinker" in res.report["note"]


def test_soliton_check_without_data_needs_rho():
    assert run(["soliton-check", "--metric", "flat_t4"]).exit_code == EXIT_ERROR
    assert run(["soliton-check", "--metric", "flat_t4", "--rho", "0"]).exit_code == EXIT_OK


def test_obstruct_k3():
    res = run(["obstruct", "--sum", "K3", "--structure", "shrinking_soliton"])
    assert res.exit_code == EXIT_FAILED and res.report["verdict"] == "obstructed"


def test_obstruct_wang_zhu_allowed():
    res = run(["obstruct", "--sum", "CP2 + 2*CP2bar", "--structure", "kahler_shrinking_soliton"])
    assert res.exit_code == EXIT_OK and res.report["verdict"] == "allowed"


def test_ht_exit_codes():
    assert run(["ht", "--sum", "CP2 + 12*CP2bar"]).exit_code == EXIT_FAILED
    assert run(["ht", "--sum", "K3"]).exit_code == EXIT_OK


def test_freedman_exit_codes():
    assert run(["freedman", "--a", "CP2 + CP2bar", "--b", "S2xS2"]).exit_code == EXIT_FAILED
    assert run(["freedman", "--a", "K3", "--b", "K3"]).exit_code == EXIT_OK
    assert run(["freedman", "--a", "T4", "--b", "S4"]).exit_code == EXIT_ERROR


def test_zoo_list():
    res = run(["zoo", "list"])
    assert res.exit_code == EXIT_OK
    assert "round_s4" in [m["name"] for m in res.report["metrics"]]


def test_usage_goes_to_stderr(capsys):
    assert main(["frobnicate"]) == EXIT_ERROR
    out, err = capsys.readouterr()
    assert out == "" and "usage:" in err


def test_main_writes_json(capsys):
    assert main(["ht", "--sum", "S4"]) == EXIT_OK
    out, _ = capsys.readouterr()
    assert json.loads(out)["verdict"] == "pass"


def test_flag_order_does_not_change_output():
    a = run(["soliton-check", "--metric", "product_s2xs2", "--param", "a=1.5", "--param", "b=1", "--rho", "0.5"])
    b = run(["soliton-check", "--rho", "0.5", "--param", "b=1", "--param", "a=1.5", "--metric", "product_s2xs2"])
    assert a.dumps() == b.dumps()


def test_subprocess_output_is_byte_identical():
    argv = ["soliton-check", "--metric", "gaussian_shrinker", "--rho", "0.5", "--json"]
    first, second = _cli(*argv), _cli(*argv)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout and first.stdout


def test_subprocess_usage_error():
    proc = _cli("--bogus")
    assert proc.returncode == 1 and proc.stdout == "" and "usage:" in proc.stderr
