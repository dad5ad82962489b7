import csv
import io
import json
import math

import numpy as np
import pytest

from stitsim.cli import RunConfig, main


def _config(tmp_path, **kw):
    raw = {"dimension": 2, "window": [0, 20], "t": 1.0, "seed": 5, "replications": 3}
    raw.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return str(path)


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--config", _config(tmp_path), "--out", str(out)]) == 0
    rows = _read(out / "stit_facets.csv")
    assert set(rows[0]) == {"replication", "birth_time", "measure", "dimension", "weight"}
    assert {r["replication"] for r in rows} == {"0", "1", "2"}
    assert all(0 < float(r["birth_time"]) <= 1.0 for r in rows)
    cells = _read(out / "stit_cells.csv")
    vol = sum(float(r["volume"]) for r in cells if r["replication"] == "0")
    assert vol == pytest.approx(400.0)
    assert "cells per replication" in capsys.readouterr().out


def test_facet_rows_match_intensity(tmp_path):
    # facets with reference point inside: |W|/pi; on the boundary: perimeter/pi
    out = tmp_path / "out"
    assert main(["simulate", "--config", _config(tmp_path, replications=200),
                 "--out", str(out)]) == 0
    rows = _read(out / "stit_facets.csv")
    per_rep = np.bincount([int(r["replication"]) for r in rows], minlength=200)
    expected = 400 / math.pi + 80 / math.pi
    se = per_rep.std(ddof=1) / math.sqrt(200)
    assert abs(per_rep.mean() - expected) < 4 * se
    assert len(rows) > 0.97 * 200 * expected


def test_rerun_is_byte_identical_across_threads(tmp_path):
    cfg = _config(tmp_path, replications=4)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", _config(tmp_path, replications=4, threads=2),
                 "--out", str(b)]) == 0
    for name in ("stit_facets.csv", "stit_cells.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    c = tmp_path / "c"
    assert main(["simulate", "--config", cfg, "--out", str(c), "--seed", "6"]) == 0
    assert (a / "stit_facets.csv").read_bytes() != (c / "stit_facets.csv").read_bytes()


def test_zero_time_gives_single_cell(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--config", _config(tmp_path, t=0.0), "--out", str(out)]) == 0
    assert _read(out / "stit_facets.csv") == []
    assert len(_read(out / "stit_cells.csv")) == 3
    text = capsys.readouterr().out
    assert "cells per replication: 1\n" in text and "facets per replication: 0\n" in text


def test_pht_model_and_emitted_json(tmp_path):
    out = tmp_path / "out"
    cfg = _config(tmp_path, dimension=3, window=[0, 4], replications=2)
    assert main(["simulate", "--config", cfg, "--model", "pht", "--out", str(out),
                 "--emit-tessellations"]) == 0
    doc = json.loads((out / "pht_00001.json").read_text())
    assert "hyperplanes" in doc
    rows = _read(out / "pht_facets.csv")
    assert rows and all(r["dimension"] == "2" and r["birth_time"] == "" for r in rows)


@pytest.mark.parametrize("bad", [
    {"directional": {"kind": "discrete", "atoms": [{"u": [1, 0], "w": 1}]}},
    {"dimension": 4},
    {"t": -1},
    {"window": [5, 1]},
    {"replications": 0},
    {"colour": "red"},
])
def test_configuration_errors_exit_2(tmp_path, capsys, bad):
    assert main(["simulate", "--config", _config(tmp_path, **bad),
                 "--out", str(tmp_path / "o")]) == 2
    assert "error" in capsys.readouterr().err


def test_usage_and_io_errors(tmp_path, capsys):
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--suite", "nope", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 3
    assert main(["plotdata", str(tmp_path / "missing.csv")]) == 3
    capsys.readouterr()


def test_axis_parallel_by_name():
    cfg = RunConfig.from_dict({"directional": "axis-parallel", "dimension": 3, "window": [0, 1]})
    assert cfg.measure().directional.kind == "discrete"
    assert cfg.window().volume == pytest.approx(1.0)


def test_verify_analytic_suite(tmp_path, capsys):
    assert main(["verify", "--suite", "analytic", "--out", str(tmp_path)]) == 0
    verdicts = json.loads((tmp_path / "verdicts_analytic.json").read_text())
    assert verdicts and all(v["passed"] for v in verdicts)
    assert capsys.readouterr().out.startswith("PASS")


def test_plotdata_from_simulation(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--config", _config(tmp_path, replications=20),
                 "--out", str(out)]) == 0
    capsys.readouterr()
    dest = tmp_path / "p2.csv"
    assert main(["plotdata", str(out / "stit_facets.csv"), "--overlay", "p2", "--bins", "20",
                 "--out", str(dest)]) == 0
    rows = _read(dest)
    assert len(rows) == 20 and set(rows[0]) == {"x", "empirical", "theory"}
    x = np.array([float(r["x"]) for r in rows])
    emp = np.array([float(r["empirical"]) for r in rows])
    width = x[1] - x[0]
    # weighted density: its integral is the weighted fraction below the last edge
    facets = _read(out / "stit_facets.csv")
    m = np.array([float(r["measure"]) for r in facets])
    w = np.array([float(r["weight"]) for r in facets])
    below = w[m < x[-1] + width / 2].sum() / w.sum()
    assert emp.sum() * width == pytest.approx(below, rel=1e-9)
    assert main(["plotdata", str(out / "stit_facets.csv"), "--overlay", "birth2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x,empirical,theory" and len(lines) == 51
    assert float(lines[-1].split(",")[2]) == pytest.approx(2 * float(lines[-1].split(",")[0]))


def test_plotdata_empty_and_malformed(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("replication,birth_time,measure,dimension,weight\n")
    assert main(["plotdata", str(empty)]) == 0
    cap = capsys.readouterr()
    assert cap.out == "x,empirical,theory\n" and "warning" in cap.err
    other = tmp_path / "other.csv"
    other.write_text("a,b\n1,2\n")
    assert main(["plotdata", str(other)]) == 2
    assert main(["plotdata", str(empty), "--overlay", "p9"]) == 2


def test_table(capsys):
    assert main(["table", "--dim", "3", "--points", "5"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["x", "density", "cdf"] and len(rows) == 6
    cdf = [float(r[2]) for r in rows[1:]]
    assert cdf == sorted(cdf)
    assert main(["table", "--t", "0"]) == 2
