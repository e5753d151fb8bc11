from __future__ import annotations

import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from tstable.cli import EXPERIMENT_COLUMNS, main, parse_range

SCHEMA = json.loads((resources.files("tstable") / "schemas" / "output.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert parse_range("5") == [5]
    assert parse_range("1:4") == [1, 2, 3, 4]
    assert parse_range("10:20:5,40") == [10, 15, 20, 40]


def test_counts_binomial_row(capsys):
    code, out, _ = run(capsys, "counts", "--t", "1", "--k", "10", "--m", "3")
    assert code == 0
    (row,) = rows(out)
    assert row["exact"] == "210"
    assert float(row["contour"]) == pytest.approx(210, rel=1e-6)
    assert row["saddle_in_window"] in ("true", "false")
    assert float(row["ln_saddle"]) > 0


def test_window_row(capsys):
    code, out, _ = run(capsys, "window", "--t", "1", "--p", "0.5", "--n", "1024", "--eps", "0.2")
    assert code == 0
    (row,) = rows(out)
    assert (row["lo"], row["hi"]) == ("17", "18")


def test_reals_round_trip(capsys):
    _, out, _ = run(capsys, "chi", "--t", "0", "--p", "0.5", "--n", "1024")
    (row,) = rows(out)
    assert float(row["lower"]) == 1024 / (float(row["alpha"]) - 2 / 0.6931471805599453 - 1)
    assert repr(float(row["upper"])) == row["upper"]


@pytest.mark.parametrize("argv", [
    ["counts", "--t", "2", "--k", "2:4", "--m", "0:4"],
    ["saddle", "--t", "3", "--y", "0.5,1.5,2.9"],
    ["profile", "--t", "1", "--p", "0.5", "--k", "10,20"],
    ["profile", "--t", "1", "--p", "0.5", "--k", "10", "--detail"],
    ["window", "--t", "2", "--p", "0.3", "--n", "100:1000:300"],
    ["chi", "--t", "1", "--p", "0.5", "--n", "200"],
    ["experiment", "--t", "1", "--p", "0.5", "--n", "15", "--trials", "3", "--seed", "1", "--jobs", "1"],
    ["partition-check", "--t", "3", "--p", "0.5", "--n", "4:8"],
])
def test_json_matches_schema(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["rows"]


def test_every_csv_has_header(capsys):
    _, out, _ = run(capsys, "experiment", "--t", "0", "--p", "0.5", "--n", "12",
                    "--trials", "2", "--seed", "4", "--jobs", "1")
    assert out.splitlines()[0].split(",") == EXPERIMENT_COLUMNS
    assert all(r["elapsed_ms"] == "" for r in rows(out))


def test_timing_flag_fills_elapsed(capsys):
    _, out, _ = run(capsys, "experiment", "--t", "0", "--p", "0.5", "--n", "12",
                    "--trials", "2", "--seed", "4", "--jobs", "1", "--timing")
    assert all(float(r["elapsed_ms"]) >= 0 for r in rows(out))


@pytest.mark.parametrize("argv, code", [
    (["nope"], 2),
    (["window", "--t", "1", "--p", "0.5", "--n", "100", "--bogus"], 2),
    (["window", "--t", "1", "--n", "100"], 2),
    (["window", "--t", "1", "--p", "0.5", "--n", "5:1"], 2),
    (["experiment", "--t", "1", "--p", "0.5", "--n", "20", "--trials", "2"], 2),
    (["window", "--t", "1", "--p", "1.5", "--n", "100"], 3),
    (["window", "--t", "1", "--p", "0.5", "--n", "2"], 3),
    (["saddle", "--t", "2", "--y", "2.0"], 3),
    (["partition-check", "--t", "1", "--p", "0.5", "--n", "41", "--r", "2"], 4),
    (["counts", "--t", "2", "--k", "4", "--m", "1", "--out", "/nonexistent-dir/x.csv"], 1),
])
def test_exit_codes(capsys, argv, code):
    assert main(argv) == code


def test_out_file_is_atomic(tmp_path, capsys):
    target = tmp_path / "w.csv"
    target.write_text("stale\n")
    assert main(["window", "--t", "1", "--p", "0.5", "--n", "1024", "--out", str(target)]) == 0
    assert target.read_text().startswith("n,alpha")
    assert [p.name for p in tmp_path.iterdir()] == ["w.csv"]


def test_experiment_byte_identical(tmp_path):
    base = ["experiment", "--t", "1", "--p", "0.5", "--n", "20,25", "--trials", "8",
            "--seed", "7", "--colour"]
    outs = []
    for i, jobs in enumerate(["1", "1", "4"]):
        path = tmp_path / f"run{i}.csv"
        assert main(base + ["--jobs", jobs, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_log_level_env(monkeypatch, capsys):
    monkeypatch.setenv("TSTABLE_LOG", "debug")
    assert main(["window", "--t", "1", "--p", "0.5", "--n", "100"]) == 0
