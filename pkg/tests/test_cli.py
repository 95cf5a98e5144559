import json

import pytest

from nilbal.catalog import N4_PRES
from nilbal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_witt(capsys):
    code, out, _ = run(capsys, "witt", "--rank", "2", "--max-class", "4")
    assert code == 0
    assert json.loads(out) == {"ranks": [2, 1, 2, 3], "hirsch": 8}


def test_balance_from_file(capsys, tmp_path):
    f = tmp_path / "N4.json"
    f.write_text(json.dumps(N4_PRES.to_json()))
    code, out, _ = run(capsys, "balance", "--input", str(f), "--class", "3")
    assert code == 0
    assert json.loads(out) == {"balanced": True, "h1": {"rank": 2}, "h2": {"rank": 2, "torsion": []}}


def test_output_is_deterministic(capsys):
    a = run(capsys, "betti", "--catalog", "TORSION4(3)", "--class", "3")[1]
    b = run(capsys, "betti", "--catalog", "TORSION4(3)", "--class", "3")[1]
    assert a == b
    assert json.loads(a)


def test_non_stabilization_exit_1(capsys):
    code, out, err = run(capsys, "multiplier", "--catalog", "FREE(2,3)", "--class", "3")
    assert code == 1
    assert out == ""
    assert "--quotient" in err


def test_quotient_flag(capsys):
    code, out, _ = run(capsys, "multiplier", "--catalog", "FREE(2,3)", "--class", "3", "--quotient")
    assert code == 0
    assert json.loads(out)["rank"] == 3


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"generators": ["x"], "relators": ["q"]}')
    assert run(capsys, "nq", "--input", str(bad), "--class", "2")[0] == 2
    assert run(capsys, "nq", "--catalog", "NOPE", "--class", "2")[0] == 2
    assert run(capsys, "nq", "--input", str(tmp_path / "missing.json"), "--class", "2")[0] == 2
    assert run(capsys, "bounds", "pd", "--h", "7", "--b1", "2")[0] == 2


def test_lie_verbs(capsys):
    code, out, _ = run(capsys, "lie-betti", "--catalog", "L4")
    assert code == 0 and json.loads(out)["betti"] == [1, 2, 2, 2, 1]
    code, out, _ = run(capsys, "gysin", "--catalog", "HEIS3", "--cocycle", "x*u*")
    assert code == 0 and json.loads(out)["gysin_beta2"] == json.loads(out)["direct_beta2"] == 2


def test_cup_on_file(capsys, tmp_path):
    f = tmp_path / "a4.json"
    f.write_text(json.dumps({"basis": ["y", "c", "d", "e"], "brackets": []}))
    code, out, _ = run(capsys, "cup", "--input", str(f), "--left", "y*d* + y*e* - c*d*",
                       "--right", "y*d* + y*e* - c*d*")
    assert code == 0
    assert json.loads(out) == {"class": "-2 y*c*d*e*", "degree": 4}


def test_bounds(capsys):
    assert json.loads(run(capsys, "bounds", "fht", "--beta", "2", "--r", "5", "--b2", "2")[1])["holds"] is False
    assert json.loads(run(capsys, "bounds", "e2", "--b1", "2", "--b2", "3", "--b3", "3", "--z", "1")[1]) \
        == {"lower": 2, "upper": 4}


def test_metabelian(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"X": [[1, 0, 0], [1, 1, 0], [0, 0, 1]], "Y": [[1, 0, 0], [0, 1, 0], [1, 0, 1]]}))
    code, out, _ = run(capsys, "metabelian", "--input", str(f))
    assert code == 0
    d = json.loads(out)
    assert (d["b0"], d["b1"], d["b2"]) == (1, 3, 2)


def test_catalog_verbs(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and "N4" in [e["name"] for e in json.loads(out)["entries"]]
    code, out, _ = run(capsys, "catalog", "verify", "N4")
    assert code == 0 and json.loads(out)["passed"]


def test_pretty_goes_to_stderr(capsys):
    code, out, err = run(capsys, "witt", "--rank", "2", "--max-class", "3", "--pretty")
    assert code == 0
    assert json.loads(out)["hirsch"] == 5
    assert err


def test_verify_all_exit_code_matches_report(capsys):
    code, out, _ = run(capsys, "verify-all", "--jobs", "2")
    reports = json.loads(out)
    assert code == (0 if all(r["passed"] for r in reports["entries"]) else 1)


def test_matrix_input(capsys, tmp_path):
    f = tmp_path / "a.json"
    f.write_text(json.dumps({"matrix": [[1, 0, 0], [1, 1, 0], [0, 1, 1]]}))
    code, out, _ = run(capsys, "balance", "--input", str(f), "--class", "3")
    assert code == 0
    assert json.loads(out)["balanced"] is True
