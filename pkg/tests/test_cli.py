import csv
import io
import json

import pytest

from sgop.cli import BAD_OPTIONS, CHECK_FAILED, OK, config_from_args, main


def test_sequences_to_stdout(capsys):
    assert main(["sequences", "--max-degree", "3"]) == OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4 and rows[2]["alpha"] == "1/180"


def test_build_writes_tables(tmp_path):
    assert main(["build", "--family", "a3", "--max-degree", "6", "--out", str(tmp_path)]) == OK
    doc = json.loads((tmp_path / "a3.json").read_text())
    assert doc["route_gap"] == "0" and doc["routes_agree"]
    assert doc["omega"][1] == ["-11/540", "1"]
    table = (tmp_path / "a3_table.csv").read_text().splitlines()
    assert table[3].split(",")[1:3] == ["1.08E-04", "-1.30E-02"]


def test_build_symmetric_conventions(tmp_path):
    assert main(["build", "--family", "sym", "--max-degree", "4", "--out", str(tmp_path)]) == OK
    doc = json.loads((tmp_path / "sym.json").read_text())
    assert doc["convention"] == "sixfold" and doc["route_gap"] is None
    out = tmp_path / "l2"
    assert main(["build", "--family", "sym", "--max-degree", "4", "--rho-convention", "l2",
                 "--out", str(out)]) == OK
    assert json.loads((out / "sym.json").read_text())["route_gap"] == "0"


def test_build_combined(capsys):
    assert main(["build", "--family", "combined", "--max-degree", "3"]) == OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["max_phi_defect"] == "0" and doc["ok"]


def test_green_reports_disagreement(tmp_path):
    rc = main(["green", "--max-generation", "20", "--out", str(tmp_path)])
    assert rc == CHECK_FAILED
    doc = json.loads((tmp_path / "green.json").read_text())
    assert set(doc) == {"trace", "hs_norm_sq"}
    assert (tmp_path / "recursions.csv").exists()
    assert (tmp_path / "recursions_verbatim.csv").exists()


@pytest.mark.parametrize("argv", [
    ["build", "--max-degree", "0"],
    ["plot", "--level", "12"],
    ["plot", "--kind", "jacobi-det"],
    ["nodal", "--family", "combined"],
    ["build", "--family", "a3", "--rho-convention", "l2"],
    ["build", "--family", "combined", "--rho-convention", "sixfold"],
    ["sequences", "--mode", "float", "--bits", "32"],
])
def test_bad_options(argv, capsys):
    assert main(argv) == BAD_OPTIONS
    assert "sgop:" in capsys.readouterr().err


def test_default_conventions():
    assert config_from_args(["build", "--family", "sym"]).convention == "sixfold"
    assert config_from_args(["nodal", "--family", "sym"]).convention == "l2"
    assert config_from_args(["nodal"]).max_degree == 19


def test_plot_is_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    argv = ["plot", "--kind", "surface", "--degree", "2", "--max-degree", "3", "--level", "4"]
    assert main(argv + ["--out", str(a)]) == OK
    assert main(argv + ["--out", str(b)]) == OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("<?xml")


@pytest.mark.parametrize("kind", ["edge", "nodal", "coeff-series"])
def test_plot_kinds(kind, tmp_path):
    out = tmp_path / f"{kind}.svg"
    assert main(["plot", "--kind", kind, "--degree", "1", "--max-degree", "3", "--level", "3",
                 "--out", str(out)]) == OK
    assert out.read_text().rstrip().endswith("</svg>")


def test_jacobi_plot(tmp_path):
    out = tmp_path / "j.svg"
    assert main(["plot", "--kind", "jacobi-det", "--mode", "float", "--max-degree", "10",
                 "--out", str(out)]) == OK


def test_nodal_outputs(tmp_path):
    assert main(["nodal", "--max-degree", "3", "--level", "4", "--out", str(tmp_path)]) == OK
    rows = list(csv.DictReader(io.StringIO((tmp_path / "nodal_a3.csv").read_text())))
    assert [r["k"] for r in rows] == ["0", "1", "2", "3"]
    assert rows[0]["nu"] == "2"
    assert (tmp_path / "labels_a3.csv").exists()
    assert (tmp_path / "nodal_a3_03.svg").exists()
