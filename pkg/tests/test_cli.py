import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from genjacobi.cli import main

DATA = Path(__file__).parent / "data"


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)


def test_jacobi_symbolic_matches_golden_report():
    res = run("verify", "jacobi", "--p", 4, "--mode", "symbolic", "--no-timing")
    assert res.exit_code == 0
    assert res.output == (DATA / "golden_jacobi_p4.json").read_text()
    report = json.loads(res.output)
    assert report["results"][0]["verdict"] == "verified"
    assert report["results"][0]["stats"]["residual_terms"] == 0


def test_report_schema():
    report = json.loads(run("--seed", 3, "verify", "jacobi", "--p", 3, "--mode", "matrix",
                            "--dim", 2, "--trials", 4).output)
    assert set(report) == {"tool", "seed", "scenario_digest", "results"}
    assert report["seed"] == 3
    r = report["results"][0]
    assert set(r) >= {"identity", "verdict", "trials", "witness", "millis"}
    assert r["trials"] == 4 and isinstance(r["millis"], int)


def test_reports_are_byte_stable():
    args = ("--seed", 5, "--no-timing", "verify", "transport", "--random", 1,
            "--identities", "3.2,4.7", "--trials", 2)
    assert run(*args).output == run(*args).output


def test_flat_geometry_scenario_all_verified():
    res = run("verify", "geometry", "--scenario", DATA / "flat_geometry.txt", "--all")
    assert res.exit_code == 0
    verdicts = [r["verdict"] for r in json.loads(res.output)["results"]]
    assert len(verdicts) == 9 and set(verdicts) == {"verified"}


def test_perturbed_transport_scenario_fails_consistency():
    res = run("verify", "transport", "--scenario", DATA / "perturbed_transport.txt",
              "--identities", "3.20")
    assert res.exit_code == 1
    r = json.loads(res.output)["results"][0]
    assert r["verdict"] == "violated"
    assert r["witness"]["lhs"] != r["witness"]["rhs"]


def test_consistent_transport_scenario_file():
    res = run("--output", "text", "verify", "transport", "--scenario",
              DATA / "consistent_transport.txt", "--identities", "3.15,3.20,4.4,4.12")
    assert res.exit_code == 0, res.output
    assert "4 verified, 0 violated" in res.output


def test_symmetric_operation_fails_antisymmetry():
    res = run("--seed", 1, "verify", "antisymmetry", "--ring", "anticommutator", "--k", 2)
    assert res.exit_code == 1
    r = json.loads(res.output)["results"][0]
    assert r["witness"]["failed"] == "1.2"


def test_identity15_with_reduction():
    report = json.loads(run("verify", "identity15", "--p", 3, "--reduction").output)
    assert [r["identity"] for r in report["results"]] == ["1.5:p=3", "1.5-reduction:p=3"]


def test_cyclic_identities_on_free_ring():
    res = run("verify", "cyclic", "--ring", "free")
    assert res.exit_code == 0
    assert [r["identity"] for r in json.loads(res.output)["results"]] == ["1.2", "1.3", "1.4"]


def test_bracket_expand_text():
    res = run("bracket", "expand", "i,j,k")
    assert res.output.strip() == "+ (i,j,k) - (i,k,j) - (j,k,i) + (k,j,i)"


def test_bracket_expand_json_and_cyclic():
    res = run("--output", "json", "bracket", "expand", "i1,i2,i3,i4", "--cyclic",
              "i1,i2,i3,i4")
    out = json.loads(res.output)
    assert out["positions"] == [1, 2, 3, 4] and len(out["terms"]) == 8


@pytest.mark.parametrize("args", [
    ("verify", "jacobi", "--p", 3, "--mode", "matrix"),
    ("verify", "antisymmetry", "--ring", "matrix", "--k", 2),
    ("verify", "geometry", "--random", 1, "--all"),
    ("verify", "geometry", "--scenario", DATA / "flat_geometry.txt"),
    ("verify", "geometry", "--scenario", DATA / "flat_geometry.txt", "--identities", "7.7"),
    ("verify", "transport", "--random", 1, "--seed", 1, "--identities", "9.1"),
    ("bracket", "expand", "i,j", "--positions", "1,1"),
    ("verify", "jacobi", "--p", 1),
])
def test_usage_errors_exit_2(args):
    assert run(*args).exit_code == 2


def test_scenario_parse_error_reports_location(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("kind = geometry\ndim = 2\n[gamma]\n1,1,1 = x1 ** 2\n")
    res = CliRunner().invoke(main, ["verify", "geometry", "--scenario", str(bad), "--all"])
    assert res.exit_code == 2
    assert f"{bad}:4:" in res.output


def test_missing_file_exits_2(tmp_path):
    res = run("verify", "geometry", "--scenario", tmp_path / "nope.txt", "--all")
    assert res.exit_code == 2
