import csv
import io
import json
import math

import pytest

from ciqwsearch.cli import COMPARE_COLUMNS, SWEEP_COLUMNS, main, parse_int_list, parse_params


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_families(capsys):
    code, out, _ = run(capsys, "families")
    assert code == 0
    names = [f["family"] for f in json.loads(out)["families"]]
    assert "Johnson" in names and "Antiregular" in names


def test_certify_star(capsys):
    code, out, _ = run(capsys, "certify", "--graph", "Star(3)")
    assert code == 0
    sp = json.loads(out)["spectrum"]
    assert sp["verdict"] == "integral"
    assert sp["values"] == [0, 1, 4] and sp["multiplicities"] == [1, 2, 1]
    assert sp["trace_identity"] and sp["analytic_match"]


def test_certify_path_rejected(capsys):
    code, out, _ = run(capsys, "certify", "--graph", "Path(4)")
    assert code == 0
    sp = json.loads(out)["spectrum"]
    assert sp["verdict"] == "rejected"
    assert len(sp["offending"]) == 2


def test_depth_hamming(capsys):
    code, out, _ = run(capsys, "depth", "--graph", "Hamming(4,2)")
    assert code == 0
    d = json.loads(out)["depth"]
    assert d["d_L"] == 3
    assert d["chain"] == [[0, 2, 4, 6, 8], [0, 4, 8], [0, 8], [0]]


def test_depth_non_integral_is_input_error(capsys):
    code, _, err = run(capsys, "depth", "--graph", "Path(4)")
    assert code == 3
    assert "rejection" in json.loads(err)


def test_search_complete_seeded(capsys):
    code, out, _ = run(capsys, "search", "--graph", "Complete(8)", "--marked-count", "2", "--seed", "7")
    assert code == 0
    rep = json.loads(out)["search"]
    assert rep["marked"]["epsilon"] == "1/4"
    assert rep["params"]["k"] == 1
    assert rep["params"]["alpha"] == pytest.approx(math.pi, abs=1e-12)
    assert rep["result"]["success_probability"] >= 1 - 1e-9


def test_search_rook_cost(capsys):
    code, out, _ = run(capsys, "search", "--graph", "Rook(2,3)", "--marked", "0,1,2")
    assert code == 0
    rep = json.loads(out)["search"]
    assert rep["params"]["s"] == 3
    assert rep["cost"]["ctqw_calls"] == 6


def test_search_path_circuit_rejected(capsys):
    code, out, err = run(capsys, "search", "--graph", "Path(4)", "--marked", "0")
    assert code == 3 and out == ""
    payload = json.loads(err)
    assert payload["rejection"]["offending"]
    assert payload["config"]["graph"] == "Path(4)"


def test_search_path_exact_mode(capsys):
    code, _, _ = run(capsys, "search", "--graph", "Path(4)", "--marked", "0", "--mode", "exact")
    assert code == 0


def test_search_wrong_epsilon_exit_2(capsys):
    code, out, _ = run(capsys, "search", "--graph", "Complete(3)", "--marked", "0", "--params", "epsilon=1/2")
    assert code == 2
    assert not json.loads(out)["search"]["result"]["passed"]


def test_search_input_errors(capsys):
    assert run(capsys, "search", "--graph", "Complete(3)")[0] == 3
    assert run(capsys, "search", "--graph", "Johnson(2,3)", "--marked", "0")[0] == 3
    assert run(capsys, "search", "--graph", "Complete(3)", "--marked", "5")[0] == 3
    assert run(capsys, "search", "--graph", "Complete(3)", "--marked", "0", "--params", "k=1")[0] == 3


def test_json_is_byte_identical(capsys):
    argv = ("search", "--graph", "Johnson(5,2)", "--marked-count", "3", "--seed", "11")
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first


def test_edge_list_file(capsys, tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text("# K4\nn 4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    code, out, _ = run(capsys, "search", "--graph", str(path), "--marked", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["graph"]["family"] == "Custom" and rep["graph"]["n"] == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("n 3\n0 1\n0 1\n")
    assert run(capsys, "certify", "--graph", str(bad))[0] == 3


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.csv"
    code, out, _ = run(capsys, "certify", "--graph", "Complete(4)", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines() == ["value,multiplicity", "0,1", "4,3"]


def test_sweep_johnson(capsys):
    argv = ["sweep", "--format", "csv", "--marked-count", "1", "--marked-count", "2"]
    for n in range(4, 7):
        argv += ["--graph", f"Johnson({n},2)"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(SWEEP_COLUMNS)
    assert len(rows) == 6
    assert all(float(r["success_probability"]) >= 1 - 1e-9 and r["error"] == "" for r in rows)


def test_sweep_empty_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--format", "csv")
    assert code == 0
    assert out.strip() == ",".join(SWEEP_COLUMNS)


def test_sweep_errors_in_row(capsys):
    code, out, _ = run(
        capsys, "sweep", "--format", "csv", "--graph", "Path(4)", "--graph", "Complete(4)", "--marked-count", "1"
    )
    assert code == 2
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["error"].startswith("NonIntegralGraphError")
    assert rows[1]["error"] == ""


def test_sweep_parallel_matches_serial(capsys):
    base = ["sweep", "--graph", "Kneser(5,2)", "--graph", "Star(5)", "--marked-count", "2", "--format", "csv"]
    serial = run(capsys, *base)[1]
    assert run(capsys, *base, "--jobs", "2")[1] == serial


def test_compare_hypercube(capsys):
    code, out, _ = run(capsys, "compare", "--series", "hypercube", "--n", "2,4,8,16", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(COMPARE_COLUMNS)
    for n, r in zip((2, 4, 8, 16), rows):
        assert int(r["N"]) == 2**n
        assert int(r["d_L"]) == int(math.log2(n)) + 1


def test_helpers():
    assert parse_int_list("4-6,9") == [4, 5, 6, 9]
    assert parse_params("k=2,alpha=1.5").beta == 1.5
    assert parse_params("epsilon=1/4").k == 1
