import json

import pytest

from hkcalc.hkcalc import main


LINEAR = ["--poly", "x1 + x2 + x3", "--prime", "2"]


def test_oracle_dim(capsys):
    assert main(["oracle-dim", *LINEAR, "--n", "1"]) == 0
    assert capsys.readouterr().out == "4\n"


def test_compute_json(capsys):
    assert main(["compute", *LINEAR, "--max-n", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert list(data) == ["p", "poly", "points", "rank_test_count"]
    assert data["p"] == 2
    assert data["poly"] == "x1 + x2 + x3"
    assert data["points"] == [
        {"n": 1, "q": 2, "hk": 4, "mult_num": 1, "mult_den": 1},
        {"n": 2, "q": 4, "hk": 16, "mult_num": 1, "mult_den": 1},
    ]


def test_compute_text_to_file(tmp_path, capsys):
    dest = tmp_path / "out" / "series.txt"
    assert main(["compute", *LINEAR, "--mode", "both", "--format", "text", "--out", str(dest)]) == 0
    assert capsys.readouterr().out == ""
    text = dest.read_text()
    assert "HK(q)" in text
    assert "rank-test monomials: 1" in text


def test_verify_csv(capsys):
    assert main(["verify", *LINEAR, "--n", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "exponents;branch;classifier_verdict;oracle_verdict;rankC;rankCe"
    assert len(lines) == 9
    assert lines[1] == "1,1,1;Cond_i;member;member;;"
    assert lines[2] == "0,1,1;RankTest_T6;not_member;not_member;0;1"


def test_verify_json(capsys):
    assert main(["verify", *LINEAR, "--n", "1", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["histogram"]["Cond_i"] == 4
    assert data["disagreements"] == []
    assert data["clamp_log"] == [[0, 1, 1]]
    assert data["rank_statistics"] == [
        {"branch": "RankTest_T6", "rankC": 0, "rankCe": 1, "rows": 1, "cols": 1, "count": 1},
    ]


def test_classify(capsys):
    assert main(["classify", *LINEAR, "--monomial", "x2*x3", "--check"]) == 0
    out = capsys.readouterr().out
    assert "RankTest_T6" in out
    assert "not_member" in out
    assert "oracle" in out


def test_tables(capsys):
    argv = ["tables", "--table", "T5", "--prime", "2", "--one-min", "3", "--two-min", "2", "--neg2", "1", "--neg3", "3"]
    assert main(argv) == 0
    assert capsys.readouterr().out == "table=T5 p=2 one_min=3 two_min=2 neg2=1 neg3=3\n1 1\n1 1\n"


def test_tables_staged(capsys):
    argv = [
        "tables", "--table", "B_B", "--staged",
        "--prime", "7", "--one-min", "3", "--two-min", "2", "--neg2", "1", "--neg3", "3",
    ]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    # the last one_min - neg2 rows are the closed-form table
    assert lines[-2:] == ["4 4", "4 6"]


@pytest.mark.parametrize("argv", [
    [],
    ["compute", "--poly", "x1 + x2 + x3", "--prime", "4"],
    ["compute", "--poly", "x1 + x2 ? x3", "--prime", "2"],
    ["compute", "--poly", "x1*x2 + x2 + x3", "--prime", "2"],
    ["compute", *LINEAR, "--max-n", "0"],
    ["classify", *LINEAR, "--monomial", "x1^2"],
    ["tables", "--table", "T8", "--prime", "2", "--one-min", "3", "--two-min", "2", "--neg2", "1", "--neg3", "3"],
])
def test_input_errors(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_budget_error(capsys):
    assert main(["oracle-dim", *LINEAR, "--n", "3", "--budget", "100"]) == 2
    assert "512" in capsys.readouterr().err
