from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest

from udncache.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_reports_loads(capsys):
    code, out, _ = _run(capsys, "run", "--k1", "3", "--k2", "3", "--t", "2", "--regime", "mid",
                        "--schemes", "a,b,uncoded", "--packet-bytes", "8")
    assert code == 0
    loads = {r["scheme"]: Fraction(int(r["load_num"]), int(r["load_den"])) for r in _rows(out)}
    assert loads == {"A": Fraction(56, 3), "B": Fraction(460, 36), "uncoded": 35}


def test_run_without_memory(capsys):
    for regime, per in (("min", 3), ("mid", 8), ("max", 7)):
        code, out, _ = _run(capsys, "run", "--t", "0", "--schemes", "a", "--regime", regime, "--packet-bytes", "2")
        assert code == 0
        assert int(_rows(out)[0]["load_num"]) == per * 9


def test_run_min_scheme_b(capsys):
    code, out, _ = _run(capsys, "run", "--k1", "3", "--k2", "3", "--t", "2", "--regime", "min", "--schemes", "b")
    row = _rows(out)[0]
    assert code == 0 and Fraction(int(row["load_num"]), int(row["load_den"])) == Fraction(226, 36)


def test_run_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"t{i}.jsonl"
        code, out, _ = _run(capsys, "run", "--k1", "3", "--k2", "4", "--t", "1", "--schemes", "a,b,d,mn",
                            "--format", "json", "--seed", "3", "--transcript", str(path))
        assert code == 0
        outs.append(out + path.read_text())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0][: outs[0].index("\n}\n") + 3])
    assert set(doc["digests"]) == {"placement", "A", "B"}


def test_run_with_demand_file(capsys, tmp_path):
    records = [{"class": c, "anchor": [a, b], "file": 0}
               for c in ("I", "II-1", "II-2") for a in range(3) for b in range(3)]
    path = tmp_path / "d.json"
    path.write_text(json.dumps(records))
    code, out, _ = _run(capsys, "run", "--regime", "min", "--t", "1", "--demands", str(path), "--n-files", "2")
    assert code == 0
    records[0]["file"] = 5
    path.write_text(json.dumps(records))
    code, _, err = _run(capsys, "run", "--regime", "min", "--t", "1", "--demands", str(path), "--n-files", "2")
    assert code == 1 and "outside" in err


def test_usage_errors(capsys):
    assert _run(capsys, "run", "--k1", "2")[0] == 1
    assert _run(capsys, "run", "--t", "99")[0] == 1
    assert _run(capsys, "run", "--schemes", "zz")[0] == 1
    assert _run(capsys, "run", "--n-files", "5")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["nosuch"])
    assert exc.value.code == 1


def test_verify_passes(capsys):
    code, out, _ = _run(capsys, "verify", "--k1", "3", "--k2", "3", "--t", "2", "--regime", "mid",
                        "--demand-mode", "random", "--seed", "7", "--packet-bytes", "8")
    assert code == 0
    assert "all 72 users decode" in out
    assert "FAIL" not in out


def test_verify_larger_grid(capsys):
    code, out, _ = _run(capsys, "verify", "--k1", "3", "--k2", "4", "--t", "3", "--packet-bytes", "4")
    assert code == 0
    assert "scheme B load 1359/110 equals closed form 1359/110" in out


def test_verify_detects_corruption(capsys):
    code, out, _ = _run(capsys, "verify", "--corrupt-symbol", "II-1:0", "--no-oracle", "--packet-bytes", "8")
    assert code == 2
    assert "FAIL scheme B" in out
    assert _run(capsys, "verify", "--corrupt-symbol", "I:0")[0] == 1


def test_verify_oracle_refusal_suggests_smaller_instance(capsys):
    code, _, err = _run(capsys, "verify", "--k1", "5", "--k2", "5", "--t", "4", "--regime", "min", "--packet-bytes", "2")
    assert code == 1 and "smaller" in err


def test_sweep_over_t(capsys):
    code, out, _ = _run(capsys, "sweep", "--k1", "6", "--k2", "6", "--n-files", "288")
    assert code == 0
    rows = _rows(out)
    by_t: dict[int, dict[str, Fraction]] = {}
    for r in rows:
        by_t.setdefault(int(r["t"]), {})[r["scheme"]] = Fraction(int(r["load_num"]), int(r["load_den"]))
    assert sorted(by_t) == list(range(37))
    for t in range(1, 36):
        assert by_t[t]["uncoded"] > by_t[t]["A"] > by_t[t]["B"]


def test_sweep_over_grid_size(capsys):
    code, out, err = _run(capsys, "sweep", "--axis", "k", "--sizes", "3x3,4x4,6x6,30x30,60x60", "--schemes", "a,uncoded")
    assert code == 0
    assert "skipping 4x4" in err
    rows = [r for r in _rows(out) if r["scheme"] == "A"]
    gaps = [abs(float(r["load_float"]) - 16) for r in rows]
    assert gaps == sorted(gaps, reverse=True) and gaps[-1] < 0.2
    unc = {int(r["K1"]) * int(r["K2"]): float(r["load_float"]) for r in _rows(out) if r["scheme"] == "uncoded"}
    assert unc[3600] / unc[900] == pytest.approx(4, rel=0.01)


def test_sweep_empty_range(capsys):
    assert _run(capsys, "sweep", "--t-min", "5", "--t-max", "2")[0] == 1
    assert _run(capsys, "sweep", "--axis", "k", "--sizes", "4x4")[0] == 1


def test_oracle_command(capsys):
    code, out, _ = _run(capsys, "oracle", "--k1", "3", "--k2", "3", "--t", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [r["bruteforce"] for r in rows] == [13, 33, 54]
    assert all(r["match"] for r in rows)
    assert _run(capsys, "oracle", "--k1", "6", "--k2", "6", "--t", "4")[0] == 1


def test_census_command(capsys):
    code, out, _ = _run(capsys, "census", "--r", "0.8", "--samples", "20000")
    assert code == 0
    assert len(json.loads(out)) == 8
