import csv
import io
import json

import pytest

from twistedfock.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, main
from twistedfock.scalar import Q


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_tables_roots(capsys):
    code, doc = run_json(capsys, "tables", "--what", "roots")
    assert code == EXIT_OK
    assert {k: len(v) for k, v in doc.items()} == {"short": 4, "middle": 4, "long": 4}


def test_tables_cocycle(capsys):
    _, doc = run_json(capsys, "tables", "--what", "cocycle")
    # eps(alpha_2, alpha_1) = -1, eps(alpha_1, alpha_2) = 1
    assert doc["simple"] == [[1, 1], [-1, 1]]


def test_tables_gcm(capsys):
    _, doc = run_json(capsys, "tables", "--what", "gcm")
    assert doc["gcm"] == [[2, -1, 0], [-2, 2, -1], [0, -2, 2]]


def test_tables_p_text(capsys):
    code, out = run(capsys, "tables", "--what", "p")
    assert code == EXIT_OK and "literal index range" in out


def test_character_depth0(capsys):
    code, doc = run_json(capsys, "character", "--depth", "0")
    assert code == EXIT_OK
    assert doc["totals"] == {"0": 4}


def test_character_csv(capsys):
    code, out = run(capsys, "character", "--depth", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["degree_offset", "h1", "h2", "multiplicity"]
    offsets = [Q(r[0]) for r in rows[1:]]
    assert offsets == sorted(offsets)
    assert sum(int(r[-1]) for r in rows[1:]) == 4 + 16 + 40 + 96 + 204


def test_character_oracle(capsys):
    code, out = run(capsys, "character", "--depth", "3", "--oracle")
    assert code == EXIT_OK and "agrees" in out


@pytest.mark.parametrize("rank,depth", [("2", "2"), ("3", "1")])
def test_hwv(capsys, rank, depth):
    code, doc = run_json(capsys, "hwv", "--rank", rank, "--depth", depth)
    assert code == EXIT_OK
    assert len(doc["vectors"]) == 1 and doc["lambda_l"] == [True]


def test_hwv_dominance(capsys):
    code, doc = run_json(capsys, "hwv", "--depth", "1", "--dominance", "3")
    assert code == EXIT_OK
    assert doc["dominance"]["solutions"] == [[0, 0]]


@pytest.mark.parametrize("argv", [
    ["hwv", "--rank", "x"],
    ["hwv", "--rank", "1"],
    ["character", "--depth", "-1"],
    ["character", "--depth", "1/3"],
    ["verify", "--suite", "bogus"],
    ["verify", "--jobs", "0"],
    [],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


def test_verify_heisenberg(capsys):
    code, out = run(capsys, "verify", "--suite", "heisenberg")
    assert code == EXIT_OK and out.rstrip().endswith("OK")


def test_verify_cartan_fails(capsys):
    code, out = run(capsys, "verify", "--suite", "cartan", "--depth", "1")
    assert code == EXIT_FAILURE and "[e0,f0]" in out


def test_verify_json_deterministic(capsys):
    argv = ["verify", "--suite", "brackets", "--depth", "1/2", "--modes", "1", "--format", "json"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv, "--jobs", "2")
    _, c = run(capsys, *argv)
    assert a == b == c
    assert json.loads(a)["ok"]


def test_verify_both_conventions(capsys):
    code, doc = run_json(capsys, "verify", "--suite", "brackets", "--depth", "1/2", "--modes", "0",
                         "--phase-convention", "both")
    assert code == EXIT_OK
    assert set(doc["reports"]) == {"full-exponent", "lattice-only"}
    row = doc["constants_diff"][0]
    assert {"stated", "full-exponent", "lattice-only"} <= set(row)


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("TWISTEDFOCK_OUTPUT_DIR", str(tmp_path / "out"))
    code, out = run(capsys, "tables", "--what", "gcm", "--format", "json")
    assert code == EXIT_OK and out == ""
    doc = json.loads((tmp_path / "out" / "tables-gcm-rank2.json").read_text())
    assert doc["gcm"][0] == [2, -1, 0]


def test_output_flag_overrides_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("TWISTEDFOCK_OUTPUT_DIR", str(tmp_path / "out"))
    target = tmp_path / "x.txt"
    main(["tables", "--what", "gcm", "--output", str(target)])
    assert target.read_text().startswith(" 2 -1  0")


def test_parser_prog():
    assert build_parser().prog == "twistedfock"
