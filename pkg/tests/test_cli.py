import json

import pytest

from sinrsched.cli import CAPACITY_ALGOS, main
from sinrsched.instancegen import gen_random, serialize_instance


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(serialize_instance(gen_random(10, 40.0, 1.0, 8.0, 3, weights=True)))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def reports(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_gen_writes_instance(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, _, _ = run(capsys, "gen", "--kind", "grid", "--m", "3", "--q", "5", "-o", str(out))
    assert code == 0
    assert len(json.loads(out.read_text())["links"]) == 9


@pytest.mark.parametrize("algo", ["groups", "online", "mean"])
def test_schedule_then_check(tmp_path, capsys, inst_file, algo):
    sched = tmp_path / "s.json"
    code, out, _ = run(capsys, "schedule", "-i", inst_file, "--algo", algo, "-o", str(sched))
    assert code == 0
    rep = reports(out)[0]
    assert rep["algorithm"] == algo and len(rep["max_affectance"]) == rep["slots"]
    code, out, _ = run(capsys, "check", "-i", inst_file, "-s", str(sched))
    assert code == 0 and reports(out)[0]["check"] == "pass"


@pytest.mark.parametrize("algo", [a for a in CAPACITY_ALGOS if not a.startswith("udg")])
def test_capacity_then_check(tmp_path, capsys, inst_file, algo):
    res = tmp_path / "c.json"
    assert run(capsys, "capacity", "-i", inst_file, "--algo", algo, "-o", str(res))[0] == 0
    code, out, _ = run(capsys, "check", "-i", inst_file, "-s", str(res), "--sinr")
    assert code == 0


def test_udg_rejects_mixed_lengths(capsys, inst_file):
    code, _, err = run(capsys, "schedule", "-i", inst_file, "--algo", "udg")
    assert code == 1 and "equilength" in err


def test_check_failure_exit_one(tmp_path, capsys, inst_file):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"slots": [list(range(10))], "power": {"gamma": 0, "delta": 0}, "p_certified": 1e6}))
    code, out, _ = run(capsys, "check", "-i", inst_file, "-s", str(bad))
    assert code == 1 and reports(out)[0]["check"] == "fail"


def test_malformed_instance_exit_two(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text('{"alpha": 3, "beta": 1, "metric": {"dim": 2}, "links": [{"id": 1, "s": [0], "r": [1, 0]}]}')
    code, _, err = run(capsys, "schedule", "-i", str(path))
    assert code == 2 and "links[0].s" in err


def test_usage_errors_exit_two(capsys, inst_file):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "schedule", "-i", inst_file, "--power", "loud")[0] == 2
    assert run(capsys, "schedule", "-i", "/nonexistent/x.json")[0] == 2
    assert run(capsys, "compare")[0] == 2
    assert run(capsys, "compare", "--seeds", "5")[0] == 2


def test_compare_ratio(capsys, inst_file):
    code, out, _ = run(capsys, "compare", "-i", inst_file, "--algo", "mean")
    rep = reports(out)[0]
    assert code == 0
    assert rep["ratio"] == rep["algorithm_value"] / rep["oracle"] >= 1


def test_compare_seed_sweep(capsys):
    code, out, _ = run(capsys, "compare", "--seeds", "1..3", "--n", "6")
    assert code == 0
    assert [r["seed"] for r in reports(out)] == [1, 2, 3]


def test_oracle_and_budget(capsys, inst_file, monkeypatch):
    code, out, _ = run(capsys, "oracle", "-i", inst_file, "--problem", "capacity", "--power", "mean")
    assert code == 0 and reports(out)[0]["oracle"] >= 1
    monkeypatch.setenv("SINRSCHED_ORACLE_MAX", "5")
    assert run(capsys, "oracle", "-i", inst_file)[0] == 1


def test_bound_constants(capsys, inst_file):
    code, out, _ = run(capsys, "bound", "-i", inst_file)
    rep = reports(out)[0]
    assert code == 0
    assert rep["tau"] == 20 and rep["Lambda"] == pytest.approx(2 * 20 ** (2 / 3))
    assert rep["M"] == 5
    assert rep["C_prime"] == pytest.approx(71.614, abs=1e-3)
    assert rep["equilength_ratio_bound"] is None


def test_text_format(capsys, inst_file):
    code, out, _ = run(capsys, "bound", "-i", inst_file, "--format", "text")
    assert code == 0 and "C_prime:" in out


def test_reports_are_reproducible(capsys, inst_file):
    def strip(text):
        rep = reports(text)[0]
        rep.pop("wall_time")
        return rep

    a = strip(run(capsys, "capacity", "-i", inst_file, "--algo", "random", "--seed", "4")[1])
    b = strip(run(capsys, "capacity", "-i", inst_file, "--algo", "random", "--seed", "4")[1])
    assert a == b
