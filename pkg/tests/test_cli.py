import json

import pytest

from permclass.cli import OUTPUT_DIR_ENV, main

CYCLE = "-1 1 1\n0 -1 -1\n"
SAMPLE_WORD = "1,2 3,2 2,1 3,1 3,2 1,2 2,2"


@pytest.fixture
def run(capsys, monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)

    def go(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err

    return go


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "M.txt"
    path.write_text(CYCLE + "cols: - + +\nrows: - +\n")
    return path


def test_decompose(run):
    code, out, _ = run("decompose", "479832156", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["skeleton"] == "2413"
    assert doc["blocks"] == ["1", "132", "321", "12"]


def test_geom_decode_with_signs(run, cycle_file):
    code, out, _ = run("geom", "decode", cycle_file, SAMPLE_WORD, "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["permutation"] == "6327415"
    assert doc["psi"] == [6, 1, 3, 7, 2, 4, 5]


def test_geom_decode_infers_signs(run, tmp_path):
    # without sign lines the canonical choice is the global flip of the listed signs
    path = tmp_path / "M.txt"
    path.write_text(CYCLE)
    code, out, _ = run("geom", "decode", path, SAMPLE_WORD, "--json")
    assert code == 0
    assert json.loads(out)["permutation"] == "7431526"


def test_geom_member_and_encode(run, cycle_file):
    assert run("geom", "member", cycle_file, "6327415", "--json")[0] == 0
    code, out, _ = run("geom", "member", cycle_file, "13542", "--json")
    assert code == 0 and json.loads(out)["member"] is False
    code, out, _ = run("geom", "encode", cycle_file, "6327415", "--json")
    assert code == 0
    word = json.loads(out)["word"]
    code, out, _ = run("geom", "decode", cycle_file, word, "--json")
    assert json.loads(out)["permutation"] == "6327415"
    assert run("geom", "encode", cycle_file, "13542")[0] == 1


def test_geom_automaton(run, cycle_file):
    code, out, _ = run("geom", "automaton", cycle_file, "--certify", "5", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["certified_to"] == 5
    assert doc["counts"][:6] == [1, 1, 2, 6, 24, 112]


def test_enumerate(run):
    code, out, _ = run("enumerate", "closure(downset(12,21))", "--n", "7")
    assert code == 0
    assert "1 2 6 22 90 394 1806" in out
    code, out, _ = run("enumerate", "avoid(231,312)", "--n", "6", "--check", "6", "--members", "3", "--json")
    doc = json.loads(out)
    assert doc["counts"] == [1, 2, 4, 8, 16, 32]
    assert doc["provenance"] == "oracle-verified"
    assert doc["members"] == ["123", "132", "213", "321"]


def test_enumerate_spec_from_file(run, tmp_path):
    path = tmp_path / "layered.spec"
    path.write_text("inflate(avoid(21), avoid(12))\n")
    code, out, _ = run("enumerate", path, "--n", "5", "--json")
    assert code == 0 and json.loads(out)["counts"] == [1, 2, 4, 8, 16]


def test_fit(run):
    code, out, _ = run("fit", "1 2 4 8 16 32 64 128 256 512 1024", "--json")
    assert code == 0
    assert json.loads(out)["gf"] == "(x) / (1 - 2x)"
    code, out, _ = run("fit", "1,2,5,14,42,132,429,1430,4862,16796,58786", "--json")
    assert json.loads(out)["gf"] == "no rational fit at bound"


def test_closure_basis_and_frameworks(run):
    code, out, _ = run("closure-basis", "downset(12,21)", "--max-len", "6", "--json")
    assert code == 0
    assert json.loads(out)["basis"] == ["2413", "3142"]
    code, out, _ = run("frameworks", "479832156", "--basis", "2413", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["framework"].startswith("2413[")
    assert doc["properties"] == []


def test_censuses(run):
    code, out, _ = run("simples", "--min", "4", "--max", "7", "--json")
    census = json.loads(out)["census"]
    assert {n: row["simples"] for n, row in census.items()} == {"4": 2, "5": 6, "6": 46, "7": 338}
    code, out, _ = run("alternations", "--min", "4", "--max", "9", "--json")
    assert json.loads(out)["parallel_alternations"] == {"4": 2, "5": 0, "6": 4, "7": 0, "8": 4, "9": 0}
    code, out, _ = run("antichain", "--k", "2", "--json")
    assert json.loads(out)["elements"] == ["2 3 4 5 1", "2 3 5 1 6 7 4"]
    code, out, _ = run("oscillations", "--upto", "5", "--json")
    assert code == 0


def test_report_examples(run):
    code, out, _ = run("report", "avoid(21)", "--n", "12", "--json")
    assert code == 0
    sections = json.loads(out)["sections"]
    assert sections["counts"]["counts"] == [1] * 12
    assert sections["fit"]["gf"] == "(x) / (1 - x)"
    code, out, _ = run("report", "inflate(avoid(21), avoid(12))", "--n", "12", "--json")
    sections = json.loads(out)["sections"]
    assert sections["counts"]["counts"] == [2 ** (n - 1) for n in range(1, 13)]
    assert sections["fit"]["gf"] == "(x) / (1 - 2x)"
    assert sections["closure_basis"]["basis"] == ["2413", "3142"]
    code, out, _ = run("report", "avoid(321)", "--n", "12", "--json")
    sections = json.loads(out)["sections"]
    assert sections["fit"]["gf"] == "no rational fit at bound"
    assert all(s["provenance"] in ("oracle-verified", "automaton-certified", "heuristic") for s in sections.values())


def test_report_on_a_grid_class(run, tmp_path):
    (tmp_path / "F.txt").write_text("1 -1\n")
    code, out, _ = run("report", f"geom({tmp_path / 'F.txt'})", "--n", "10", "--certify", "6", "--json")
    assert code == 0
    cert = json.loads(out)["sections"]["certification"]
    assert cert["status"] == "ok" and cert["provenance"] == "automaton-certified"
    assert cert["certified_to"] == 6


def test_report_is_deterministic(run, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("report", "avoid(132)", "--n", "10", "--output-dir", a)[0] == 0
    assert run("report", "avoid(132)", "--n", "10", "--output-dir", b, "--workers", "2")[0] == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_csv_export(run, tmp_path):
    assert run("enumerate", "avoid(21)", "--n", "3", "--output-dir", tmp_path, "--csv")[0] == 0
    assert (tmp_path / "enumerate.csv").read_text().splitlines() == ["n,count", "1,1", "2,1", "3,1"]


def test_output_dir_from_environment(run, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    assert run("decompose", "2413")[0] == 0
    assert json.loads((tmp_path / "env" / "decompose.json").read_text())["skeleton"] == "2413"
    # the flag wins over the environment
    assert run("decompose", "2413", "--output-dir", tmp_path / "flag")[0] == 0
    assert (tmp_path / "flag" / "decompose.json").exists()


def test_config_file(run, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n_max": 4}))
    code, out, _ = run("enumerate", "avoid(21)", "--config", cfg, "--json")
    assert json.loads(out)["counts"] == [1, 1, 1, 1]
    code, out, _ = run("enumerate", "avoid(21)", "--config", cfg, "--n", "2", "--json")
    assert json.loads(out)["counts"] == [1, 1]
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run("enumerate", "avoid(21)", "--config", cfg)
    assert code == 1 and "unknown keys" in err
    cfg.write_text("{\n  \"n_max\": \n}")
    code, _, err = run("enumerate", "avoid(21)", "--config", cfg)
    assert code == 1 and "line 3" in err


@pytest.mark.parametrize(
    "argv, message",
    [
        (["decompose", "1223"], "bad permutation"),
        (["enumerate", "avoid(12"], "column 9"),
        (["enumerate", "all", "--n", "20"], "cap"),
        (["enumerate", "all", "--n", "13", "--check", "13"], "cap"),
        (["simples", "--max", "13"], "cap"),
        (["fit", "1 2 x"], "bad count list"),
        (["geom", "decode", "/nonexistent/M.txt", "1,1"], "M.txt"),
    ],
)
def test_domain_errors_exit_one(run, argv, message):
    code, out, err = run(*argv)
    assert code == 1
    assert message in err
    assert out == ""


def test_bad_matrix_file_names_the_line(run, tmp_path):
    path = tmp_path / "M.txt"
    path.write_text("1 0\n1 2\n")
    code, _, err = run("geom", "member", path, "12")
    assert code == 1 and "line 2" in err


def test_word_with_empty_cell(run, cycle_file):
    code, _, err = run("geom", "decode", cycle_file, "1,1")
    assert code == 1 and "empty cell" in err


def test_usage_errors_exit_two(run):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["enumerate", "all", "--n", "many"])
    assert err.value.code == 2
