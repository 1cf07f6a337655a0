"""Command-line behaviour: outputs, exit codes, determinism."""

import json

import pytest

from starsched.cli import run


def test_avg_trials_first_row(tmp_path, capsys):
    out = tmp_path / "trials.csv"
    assert run(["avg-trials", "--m-max", "8", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "m,avg_trials"
    m, value = lines[1].split(",")
    assert m == "1" and float(value) == 2.0


def test_compare_serial_row(tmp_path):
    out = tmp_path / "cmp.csv"
    assert run(["compare-serial", "--n", "4", "--out", str(out)]) == 0
    row = out.read_text().splitlines()[1].split(",")
    assert row[0] == "4" and row[1] == "1856"
    assert 0 < float(row[3]) < 100


def test_simulate_rus_outputs(tmp_path):
    out = tmp_path / "summary.json"
    hist = tmp_path / "hist.csv"
    code = run(
        [
            "simulate-rus", "--m", "4", "--runs", "50", "--seed", "1",
            "--out", str(out), "--hist", str(hist),
        ]
    )
    assert code == 0
    summary = json.loads(out.read_text())
    assert set(summary) == {"mean", "p50", "p95", "max", "runs", "seed"}
    assert summary["runs"] == 50 and summary["seed"] == 1
    rows = hist.read_text().splitlines()
    assert rows[0] == "clock,count"
    assert sum(int(r.split(",")[1]) for r in rows[1:]) == 50


def test_compile_trotter_outputs(tmp_path):
    out = tmp_path / "summary.json"
    timeline = tmp_path / "timeline.jsonl"
    code = run(
        ["compile-trotter", "--n", "4", "--out", str(out), "--timeline", str(timeline)]
    )
    assert code == 0
    summary = json.loads(out.read_text())
    assert summary["fixed_clocks"] == 14 * 4 + 55
    assert summary["L"] == 3
    assert {g["basis"] for g in summary["rus_groups"]} == {"Z", "ZZ"}
    assert all(json.loads(line) for line in timeline.read_text().splitlines())


def test_estimate_exit_codes(tmp_path):
    out = tmp_path / "report.json"
    assert run(["estimate", "--n", "4"]) == 2  # no error norm, no calibration
    assert (
        run(["estimate", "--n", "4", "--calibrate-nmax", "3397", "--out", str(out)])
        == 0
    )
    report = json.loads(out.read_text())
    assert report["d"] == 9


def test_estimate_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trotter": {"w_norm": 1.0e7}}))
    out = tmp_path / "report.json"
    assert run(["estimate", "--n", "4", "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["w_norm"] == 1.0e7


def test_malformed_config_names_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"qcels": {"shots": 5}}))
    assert run(["estimate", "--n", "4", "--config", str(cfg)]) == 1
    assert "qcels.shots" in capsys.readouterr().err


def test_invalid_json_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run(["estimate", "--n", "4", "--config", str(cfg)]) == 1
    assert "JSON" in capsys.readouterr().err


def test_qcels_demo_output(tmp_path):
    out = tmp_path / "demo.json"
    code = run(
        ["qcels-demo", "--trials", "10", "--seed", "2", "--out", str(out)]
    )
    assert code == 0
    demo = json.loads(out.read_text())
    assert 0 <= demo["success_rate"] <= 1
    assert demo["params"]["trials"] == 10


def test_custom_spectrum_file(tmp_path):
    spec = tmp_path / "spectrum.json"
    spec.write_text(json.dumps({"phases": [0.3], "weights": [1.0]}))
    out = tmp_path / "demo.json"
    code = run(
        [
            "qcels-demo", "--spectrum", str(spec), "--trials", "5",
            "--samples", "0", "--out", str(out),
        ]
    )
    assert code == 0
    assert json.loads(out.read_text())["success_rate"] == 1.0


def test_bad_spectrum_is_validation_error(tmp_path, capsys):
    spec = tmp_path / "spectrum.json"
    spec.write_text(json.dumps({"phases": [0.3], "weights": [0.5]}))
    assert run(["qcels-demo", "--spectrum", str(spec)]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate-rus", "--m", "8", "--runs", "40", "--seed", "11"],
        ["qcels-demo", "--trials", "5", "--seed", "11"],
        ["compile-trotter", "--n", "3"],
        ["avg-trials", "--m-max", "12"],
    ],
)
def test_repeat_runs_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_thread_env_override_preserves_output(tmp_path, monkeypatch):
    argv = ["simulate-rus", "--m", "8", "--runs", "40", "--seed", "11"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(argv + ["--out", str(a)]) == 0
    monkeypatch.setenv("STAR_THREADS", "4")
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bad_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("STAR_THREADS", "lots")
    assert run(["avg-trials", "--m-max", "2"]) == 1
