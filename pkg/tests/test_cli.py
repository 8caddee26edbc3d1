"""CLI behavior: subcommands, exit codes, determinism, output files."""

import json

import pytest

from blidkit.cli import main

PROBLEM = {
    "A": [[0.5, 0.0], [0.0, 2.0]],
    "terms": [
        {
            "dim": 2,
            "codim": 1,
            "degree": 2,
            "coords": [{"exponents": [2, 0], "coeff": 2.0}, {"exponents": [0, 2], "coeff": 2.0}],
        }
    ],
    "flat_term": None,
    "degree_cap": 2,
    "tol": 1e-8,
    "box_halfwidth": 3.0,
}

JET = {
    "dim": 2,
    "J": 2,
    "polys": [
        {"dim": 2, "codim": 1, "degree": 0, "coords": [{"exponents": [0, 0], "coeff": 0.1}]},
        {"dim": 2, "codim": 1, "degree": 1, "coords": [{"exponents": [1, 0], "coeff": 1.0}]},
        {"dim": 2, "codim": 1, "degree": 2, "coords": [{"exponents": [1, 1], "coeff": 0.5}]},
    ],
}


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_selftest_passes(tmp_path, capsys):
    assert main(["selftest", "--out", str(tmp_path / "out")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines)
    report = json.loads((tmp_path / "out" / "selftest.json").read_text())
    assert all(check["passed"] for check in report["checks"])


def test_extend_demo(tmp_path):
    assert main(["extend", "--out", str(tmp_path / "out")]) == 0
    report = json.loads((tmp_path / "out" / "extend.json").read_text())
    assert report["max_disagreement_below_threshold"] == 0.0
    rows = (tmp_path / "out" / "extend.csv").read_text().strip().splitlines()
    assert rows[0] == "sup_norm,raw,extended"
    assert len(rows) > 10


def test_cohomo_solve_and_resonances(tmp_path):
    problem = write(tmp_path, "problem.json", PROBLEM)
    assert main(["cohomo", "solve", "--input", problem, "--out", str(tmp_path / "s")]) == 0
    report = json.loads((tmp_path / "s" / "cohomo.json").read_text())
    assert report["global_residual"] <= 1e-8
    assert report["resonances"] == [{"multi_index": [1, 1], "residual": 0.0}]

    spec = write(tmp_path, "res.json", {"eigenvalues": [[2.0, 0.0], [0.5, 0.0]], "n_max": 4})
    assert main(["cohomo", "resonances", "--input", spec, "--out", str(tmp_path / "r")]) == 0
    hits = json.loads((tmp_path / "r" / "resonances.json").read_text())["hits"]
    assert [h["multi_index"] for h in hits] == [[1, 1], [2, 2]]


def test_resonant_problem_exits_1_with_report(tmp_path):
    bad = dict(PROBLEM)
    bad["A"] = [[2.0, 0.0], [0.0, 0.5]]
    bad["terms"] = [
        {"dim": 2, "codim": 1, "degree": 2, "coords": [{"exponents": [1, 1], "coeff": 2.0}]}
    ]
    path = write(tmp_path, "resonant.json", bad)
    assert main(["cohomo", "solve", "--input", path, "--out", str(tmp_path / "out")]) == 1
    error = json.loads((tmp_path / "out" / "error.json").read_text())
    assert error["error"] == "SingularResonance"
    assert [1, 1] in error["multi_indices"]


def test_parse_error_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["cohomo", "solve", "--input", str(bad), "--out", str(tmp_path / "out")]) == 2
    error = json.loads((tmp_path / "out" / "error.json").read_text())
    assert error["error"] == "ParseError"
    assert main(["borel", "--out", str(tmp_path / "out2")]) == 2  # missing --input


def test_borel(tmp_path):
    jet = write(tmp_path, "jet.json", JET)
    assert main(["borel", "--input", jet, "--out", str(tmp_path / "out")]) == 0
    report = json.loads((tmp_path / "out" / "borel.json").read_text())
    assert report["worst_scale_rel_err"] <= 1e-4


def test_blid_show(tmp_path):
    assert main(["blid", "show", "--out", str(tmp_path / "out"), "--samples", "50"]) == 0
    rows = (tmp_path / "out" / "blid_profile.csv").read_text().strip().splitlines()
    assert rows[0] == "s,cutoff,cutoff_derivative,blid"
    assert len(rows) == 51


def test_determinism(tmp_path):
    problem = write(tmp_path, "problem.json", PROBLEM)
    for sub in ("a", "b"):
        assert main(
            ["cohomo", "solve", "--input", problem, "--seed", "9", "--out", str(tmp_path / sub)]
        ) == 0
    assert (tmp_path / "a" / "cohomo.json").read_bytes() == (tmp_path / "b" / "cohomo.json").read_bytes()
    assert (
        (tmp_path / "a" / "cohomo_residuals.csv").read_bytes()
        == (tmp_path / "b" / "cohomo_residuals.csv").read_bytes()
    )


def test_env_var_out(tmp_path, monkeypatch):
    monkeypatch.setenv("BLIDKIT_OUT", str(tmp_path / "envout"))
    assert main(["blid", "show", "--samples", "10"]) == 0
    assert (tmp_path / "envout" / "blid_profile.csv").exists()
