from __future__ import annotations

import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from setmax.cli import main
from setmax.constructions import build_tight_supermodular, random_instance, reduce_kdm
from setmax.io import (
    constraint_from_json,
    constraint_to_json,
    dump_instance,
    instance_fingerprint,
    instance_from_json,
    load_instance,
    save_instance,
)
from setmax.model import InvalidInstanceError
from setmax.runner import generate


@pytest.mark.parametrize(
    "inst",
    [
        random_instance(9, 2, "intersection", seed=4, submodular_fraction="1/2"),
        random_instance(6, 1, "partition", seed=1),
        build_tight_supermodular(1, 2, Fraction(1, 10)),
        reduce_kdm([(0, 1), (1, 1)], 1, 1),
    ],
)
def test_instance_round_trip_is_byte_exact(inst, tmp_path):
    path = tmp_path / "i.json"
    save_instance(inst, path)
    again = load_instance(path)
    assert dump_instance(again) == path.read_text()
    assert instance_fingerprint(again) == instance_fingerprint(inst)
    for s in ({0}, {0, 1}, set(range(inst.n))):
        assert again.f.value(s) == inst.f.value(s)


def test_constraint_round_trip():
    doc = {"type": "intersection", "of": [{"type": "uniform", "k": 2}, {"type": "partition", "parts": [[0, 1]], "capacities": [1]}]}
    assert constraint_to_json(constraint_from_json(doc, 3)) == doc


def test_tampered_construction_rejected():
    doc = json.loads(dump_instance(build_tight_supermodular(1, 1)))
    doc["constraint"] = {"type": "uniform", "k": 1}
    with pytest.raises(InvalidInstanceError):
        instance_from_json(doc)
    doc = json.loads(dump_instance(build_tight_supermodular(1, 1)))
    doc["schema"] = 99
    with pytest.raises(InvalidInstanceError):
        instance_from_json(doc)


def test_gen_examples(tmp_path):
    a = tmp_path / "a.json"
    assert main(["gen", "tight-supermodular", "--k", "1", "--d", "2", "--eps", "1/10", "-o", str(a)]) == 0
    assert json.loads(a.read_text())["n"] == 15
    b = tmp_path / "b.json"
    assert main(["gen", "tight-dependency", "--k", "1", "--d", "1", "--eps", "1/10", "-o", str(b)]) == 0
    assert json.loads(b.read_text())["n"] == 4
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for p in (r1, r2):
        assert main(["gen", "random", "--n", "10", "--d", "2", "--seed", "7", "-o", str(p)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    for args in (["kdm", "--k", "1", "--d", "1"], ["welfare"], ["graph-uniform"], ["random", "--n", "5", "--d", "1", "--constraint", "partition"]):
        out = tmp_path / f"{args[0]}.json"
        assert main(["gen", *args, "-o", str(out)]) == 0
        load_instance(out)


def test_gen_bad_params_exit_2(tmp_path, capsys):
    assert main(["gen", "random", "--n", "3", "--d", "5"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["gen", "tight-supermodular", "--k", "0", "--d", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["gen", "random", "--n", "x", "--d", "1"])
    assert exc.value.code == 2


def test_solve_tight_ratio(tmp_path):
    a = tmp_path / "a.json"
    main(["gen", "tight-supermodular", "--k", "1", "--d", "2", "--eps", "1/10", "-o", str(a)])
    rep = tmp_path / "rep.json"
    assert main(["solve", str(a), "--alg", "ext-super", "--opt", "-o", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["algorithms"]["ext-super"]["ratio"] == "11/40"
    assert report["algorithms"]["ext-super"]["value"] == "11/10"
    assert report["instance"] == instance_fingerprint(load_instance(a))


def test_solve_guess_on_linear_instance(tmp_path):
    path = tmp_path / "lin.json"
    main(["gen", "random", "--n", "8", "--d", "0", "--k", "3", "--seed", "2", "-o", str(path)])
    rep = tmp_path / "rep.json"
    assert main(["solve", str(path), "--alg", "guess", "--alg", "simple", "-o", str(rep)]) == 0
    report = json.loads(rep.read_text())
    ratio = Fraction(report["algorithms"]["guess"]["ratio"])
    assert ratio >= 1 - (1 - Fraction(1, 3)) ** 3


def test_solve_incompatible_alg_exit_2(tmp_path):
    path = tmp_path / "p.json"
    main(["gen", "random", "--n", "6", "--d", "1", "--constraint", "partition", "-o", str(path)])
    assert main(["solve", str(path), "--alg", "simple"]) == 2
    assert main(["solve", str(tmp_path / "missing.json")]) == 2


def test_solve_with_audit(tmp_path):
    path = tmp_path / "i.json"
    main(["gen", "random", "--n", "9", "--d", "2", "--constraint", "intersection", "--seed", "3", "-o", str(path)])
    rep = tmp_path / "rep.json"
    assert main(["solve", str(path), "--alg", "ext-super", "--alg", "ext-dep", "--alg", "brute", "--audit", "-o", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert set(report["audits"]) == {"ext-super", "ext-dep"}
    assert all(a["ok"] for a in report["audits"].values())
    assert report["algorithms"]["brute"]["ratio"] == "1/1"


def test_solve_exit_3_on_falsified_bound(tmp_path, monkeypatch):
    import setmax.runner as runner
    from setmax.audit import BoundCheck

    path = tmp_path / "i.json"
    main(["gen", "random", "--n", "5", "--d", "1", "-o", str(path)])
    monkeypatch.setattr(runner, "check_bounds", lambda *a, **k: [BoundCheck("forced", Fraction(1), Fraction(0), Fraction(1))])
    assert main(["solve", str(path), "-o", str(tmp_path / "r.json")]) == 3


def _strip_ms(text):
    rows = list(csv.DictReader(text.splitlines()))
    for r in rows:
        r.pop("ms")
    return rows


def test_bench_matrix_and_determinism(tmp_path):
    config = {
        "algorithms": ["ext-super", "ext-dep", "guess"],
        "instances": [
            {"gen": "random", "params": {"n": 7, "d": 1, "k": 3}, "seeds": [0, 1, 2]},
            {"gen": "random", "params": {"n": 6, "d": 2, "constraint": "partition"}, "seeds": [5]},
        ],
    }
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps(config))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["bench", str(cfg), "-o", str(out1)]) == 0
    assert main(["bench", str(cfg), "-o", str(out2)]) == 0
    assert _strip_ms(out1.read_text()) == _strip_ms(out2.read_text())
    rows = _strip_ms(out1.read_text())
    assert len(rows) == 4 * 3
    partition_guess = [r for r in rows if r["algorithm"] == "guess" and r["n"] == "6"]
    assert partition_guess and partition_guess[0]["error"]
    assert all(r["bound_ok"] == "True" for r in rows if not r["error"])
    agg = json.loads(out1.with_suffix(".json").read_text())
    assert agg["rows"] == 12


def test_bench_empty_matrix(tmp_path):
    cfg = tmp_path / "empty.json"
    cfg.write_text("{}")
    out = tmp_path / "e.csv"
    assert main(["bench", str(cfg), "-o", str(out)]) == 0
    assert out.read_text().startswith("instance,seed,algorithm,n,k,d,value,opt,ratio,bound")
    assert len(out.read_text().splitlines()) == 1


def test_console_entry_point(tmp_path):
    out = tmp_path / "t.json"
    proc = subprocess.run(
        [sys.executable, "-m", "setmax", "gen", "tight-dependency", "--k", "1", "--d", "1", "-o", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert generate("tight-dependency", {"k": 1, "d": 1}).n == json.loads(out.read_text())["n"]
