import csv
import json

import pytest

from lib.constants import ExitCode
from main import main, parse_args


def _run(tmp_path, *argv):
    return main(["-o", str(tmp_path), *argv])


def _rows(path):
    with path.open() as f:
        return list(csv.DictReader(f))


def test_construct(tmp_path, capsys):
    assert _run(tmp_path, "construct", "--m", "2", "--k", "4") == ExitCode.OK
    summary = json.loads((tmp_path / "code_m2_k4.json").read_text())
    assert (summary["n"], summary["k"], summary["d"]) == (14, 4, 2)
    assert summary["maximal"] == "maximal"
    assert (tmp_path / "H_m2_k4.txt").read_text().startswith("H1 4 H0 2\n6 14\n")
    assert (tmp_path / "basis_m2.txt").read_text().startswith("6 18\n")
    manifest = json.loads((tmp_path / "construct_manifest.json").read_text())
    assert manifest["parameters"]["m"] == 2
    assert len(manifest["outputs"]) == 3
    assert "[14,4,2]_3" in capsys.readouterr().out


def test_construct_with_explicit_punctures(tmp_path):
    assert _run(tmp_path, "construct", "--m", "2", "--k", "2", "--punctures", "1,7") == 0
    summary = json.loads((tmp_path / "code_m2_k2.json").read_text())
    assert summary["punctures"] == [1, 7]


@pytest.mark.parametrize(
    "argv, message",
    [
        (["construct", "--m", "2", "--k", "5"], "k exceeds 3m-2 (k=5, m=2)"),
        (["construct", "--m", "2", "--k", "0"], "k must be at least 1, got 0"),
        (["construct", "--m", "1", "--k", "2", "--punctures", "1,4"], "k exceeds 3m-2"),
        (["construct", "--m", "1", "--k", "1", "--punctures", "1,4"], "2 puncture coordinates"),
        (["basin", "--m", "1", "--resolution", "1"], "at least 2"),
    ],
)
def test_domain_errors(tmp_path, capsys, argv, message):
    assert _run(tmp_path, *argv) == ExitCode.DOMAIN_ERROR
    out = capsys.readouterr().out
    assert out.startswith("[ERROR]")
    assert message in out


def test_yield_table(tmp_path):
    assert _run(tmp_path, "yield", "--m-max", "3") == 0
    rows = _rows(tmp_path / "yield.csv")
    assert [(r["m"], r["n"], r["k"]) for r in rows] == [
        ("1", "8", "1"),
        ("2", "14", "4"),
        ("3", "20", "7"),
    ]
    assert float(rows[2]["gamma"]) == pytest.approx(1.514, abs=0.005)


def test_threshold(tmp_path):
    assert _run(tmp_path, "threshold", "--m", "1") == 0
    data = json.loads((tmp_path / "threshold_m1.json").read_text())
    assert data["code"] == "[8,1,2]_3"
    assert data["delta_star"] == pytest.approx(0.317, abs=0.001)
    assert data["orientation"] == "conjugate"


def test_threshold_sweep(tmp_path):
    assert _run(tmp_path, "threshold", "--m", "1", "--m-max", "2") == 0
    rows = _rows(tmp_path / "thresholds.csv")
    assert [r["n"] for r in rows] == ["8", "17"]


def test_basin(tmp_path):
    assert _run(tmp_path, "--orientation", "direct", "basin", "--m", "1", "--resolution", "6") == 0
    rows = _rows(tmp_path / "basin_m1_r6.csv")
    assert len(rows) == 28
    assert rows[0]["label"] == "M0"
    assert {r["in_polytope"] for r in rows} <= {"true", "false"}


def test_search(tmp_path):
    assert _run(tmp_path, "search", "--n", "3") == 0
    index = json.loads((tmp_path / "catalog_n3" / "index.json").read_text())
    assert index["exhausted"] is True
    assert index["spaces"][0]["maximal"] == "maximal"
    assert (tmp_path / "catalog_n3" / "space_000.txt").read_text() == "1 3\n1 1 1\n"


def test_search_budget_warning(tmp_path, capsys):
    assert _run(tmp_path, "search", "--n", "5", "--budget", "0") == 0
    assert "[WARNING] Node budget 0 exhausted" in capsys.readouterr().out


def test_orientation_flag_parses():
    args = parse_args(["--orientation", "direct", "selftest"])
    assert str(args.orientation) == "direct"


@pytest.mark.slow
def test_selftest_passes(tmp_path, capsys):
    assert _run(tmp_path, "selftest") == ExitCode.OK
    out = capsys.readouterr().out
    assert "[FAIL]" not in out
    assert out.count("[PASS]") == 8
