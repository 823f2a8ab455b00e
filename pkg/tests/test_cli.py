"""CLI surface: commands, exit codes, CSV format, config file, determinism."""
import csv
import json
import math

import pytest

from coded_aoi import SystemParams, age_mds, age_uncoded, opt_mds
from coded_aoi.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def value_of(text, key):
    for token in text.split():
        if token.startswith(key + "="):
            return token.split("=", 1)[1]
    raise KeyError(f"{key} not in output: {text!r}")


def read_rows(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_age_mds_reference_point(capsys):
    code, out, _ = run_cli(capsys, "age", "--scheme", "mds", "--n", "100", "--k", "69",
                           "--lambda", "1", "--c", "1", "--mu", "1")
    assert code == 0
    expected = age_mds(SystemParams(1, 1, 1, 100), 69).delta
    assert float(value_of(out, "age")) == pytest.approx(expected, rel=1e-12)


def test_age_uncoded_single_worker(capsys):
    code, out, _ = run_cli(capsys, "age", "--scheme", "uncoded", "--n", "1",
                           "--lambda", "1", "--c", "1", "--mu", "1")
    assert code == 0
    assert float(value_of(out, "age")) == pytest.approx(29 / 6, rel=1e-12)


def test_age_invalid_k_exits_2(capsys):
    code, _, err = run_cli(capsys, "age", "--scheme", "mds", "--n", "100", "--k", "100",
                           "--lambda", "1", "--c", "1", "--mu", "1")
    assert code == 2
    assert "k must be < n" in err


def test_age_missing_flag_exits_2(capsys):
    code, _, err = run_cli(capsys, "age", "--scheme", "mds", "--n", "100", "--k", "10")
    assert code == 2
    assert "--lambda" in err


def test_age_degenerate_levels_exits_3(capsys):
    code, _, err = run_cli(capsys, "age", "--scheme", "mm-mds", "--n", "100", "--k", "1",
                           "--l", "4", "--lambda", "1", "--c", "1", "--mu", "0.0001")
    assert code == 3
    assert "level" in err


def test_optimize_mds(capsys):
    code, out, _ = run_cli(capsys, "optimize", "--family", "mds", "--n", "100",
                           "--lambda", "1", "--c", "1", "--mu", "1")
    assert code == 0
    assert value_of(out, "k_star") == "69"


def test_optimize_repetition(capsys):
    code, out, _ = run_cli(capsys, "optimize", "--family", "rep", "--n", "100",
                           "--lambda", "1", "--c", "1", "--mu", "0.5")
    assert code == 0
    assert value_of(out, "k_star") == "50"


def test_optimize_mm_mds_single_load_matches_mds(capsys):
    code, out, _ = run_cli(capsys, "optimize", "--family", "mm-mds", "--l", "1",
                           "--n", "100", "--lambda", "1", "--c", "1", "--mu", "1")
    assert code == 0
    k_mm = int(value_of(out, "k_star"))
    k_mds = opt_mds(SystemParams(1, 1, 1, 100)).k_star
    assert abs(k_mm - k_mds) <= 1
    assert value_of(out, "levels") == str(k_mm)


def test_simulate_deterministic_and_close_to_analytic(capsys):
    argv = ["simulate", "--scheme", "mds", "--n", "100", "--k", "69",
            "--lambda", "1", "--c", "1", "--mu", "1",
            "--cycles", "50000", "--seed", "7"]
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    mean = float(value_of(out1, "mean_age"))
    expected = age_mds(SystemParams(1, 1, 1, 100), 69).delta
    assert abs(mean - expected) / expected < 0.01


def test_simulate_requires_seed_and_cycles(capsys):
    base = ["simulate", "--scheme", "uncoded", "--n", "10",
            "--lambda", "1", "--c", "1", "--mu", "1"]
    code, _, err = run_cli(capsys, *base, "--cycles", "1000")
    assert code == 2 and "--seed" in err
    code, _, err = run_cli(capsys, *base, "--seed", "3")
    assert code == 2 and "--cycles" in err


def test_simulate_rejects_nondivisor_repetition(capsys):
    code, _, err = run_cli(capsys, "simulate", "--scheme", "repetition", "--n", "100",
                           "--k", "33", "--lambda", "1", "--c", "1", "--mu", "1",
                           "--cycles", "1000", "--seed", "1")
    assert code == 2
    assert "divide" in err


def test_config_file_supplies_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"scheme": "mds", "n": 100, "k": 69,
                               "lambda": 1.0, "c": 1.0, "mu": 1.0}))
    code, out, _ = run_cli(capsys, "age", "--config", str(cfg))
    assert code == 0
    p = SystemParams(1, 1, 1, 100)
    assert float(value_of(out, "age")) == pytest.approx(age_mds(p, 69).delta, rel=1e-12)
    # explicit flag wins over the config value
    code, out, _ = run_cli(capsys, "age", "--config", str(cfg), "--k", "58")
    assert float(value_of(out, "age")) == pytest.approx(age_mds(p, 58).delta, rel=1e-12)


def test_config_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"scheme": "mds", "warp": 9}))
    code, _, err = run_cli(capsys, "age", "--config", str(cfg))
    assert code == 2
    assert "warp" in err


def test_sweep_requires_seed(tmp_path, capsys):
    code, _, err = run_cli(capsys, "sweep", "--preset", "fig4a",
                           "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "--seed" in err


def test_sweep_preset_fig4a(tmp_path, capsys):
    out_path = tmp_path / "fig4a.csv"
    code, _, _ = run_cli(capsys, "sweep", "--preset", "fig4a", "--seed", "1",
                         "--out", str(out_path))
    assert code == 0
    rows = read_rows(out_path)
    mds_rows = [r for r in rows if r["scheme"] == "mds"]
    rep_rows = [r for r in rows if r["scheme"] == "repetition"]
    unc_rows = [r for r in rows if r["scheme"] == "uncoded"]
    assert len(mds_rows) == 99 and len(rep_rows) == 100 and len(unc_rows) == 1
    best_mds = min(mds_rows, key=lambda r: float(r["age_analytic"]))
    assert best_mds["k"] == "69"
    best_rep = min(rep_rows, key=lambda r: float(r["age_analytic"]))
    assert best_rep["k"] == "100"
    assert float(unc_rows[0]["age_analytic"]) == pytest.approx(
        age_uncoded(SystemParams(1, 1, 1, 100)).delta, rel=1e-11)
    # divisibility caveat recorded for the repetition rows
    header = out_path.read_text().splitlines()[:4]
    assert any("k | n" in ln for ln in header if ln.startswith("#"))


def test_sweep_preset_fig4b_optima(tmp_path, capsys):
    out_path = tmp_path / "fig4b.csv"
    assert run_cli(capsys, "sweep", "--preset", "fig4b", "--seed", "1",
                   "--out", str(out_path))[0] == 0
    rows = read_rows(out_path)
    best_mds = min((r for r in rows if r["scheme"] == "mds"),
                   key=lambda r: float(r["age_analytic"]))
    best_rep = min((r for r in rows if r["scheme"] == "repetition"),
                   key=lambda r: float(r["age_analytic"]))
    assert best_mds["k"] == "58"
    assert best_rep["k"] == "50"


def test_sweep_preset_fig5b_trend(tmp_path, capsys):
    out_path = tmp_path / "fig5b.csv"
    assert run_cli(capsys, "sweep", "--preset", "fig5b", "--seed", "1",
                   "--out", str(out_path))[0] == 0
    rows = read_rows(out_path)
    assert [r["l"] for r in rows] == ["1", "2", "3", "4", "5"]
    ages = [float(r["age_analytic"]) for r in rows]
    assert all(b <= a + 1e-12 for a, b in zip(ages, ages[1:]))
    assert ages[1] < ages[0]
    assert all(r["k1"] != "" for r in rows)


def test_sweep_preset_fig5a_k_grows(tmp_path, capsys):
    out_path = tmp_path / "fig5a.csv"
    assert run_cli(capsys, "sweep", "--preset", "fig5a", "--seed", "1",
                   "--out", str(out_path))[0] == 0
    rows = read_rows(out_path)
    ks = [int(r["k"]) for r in rows]
    assert len(ks) == 10
    assert all(b > a for a, b in zip(ks, ks[1:]))
    assert all(int(r["k1"]) < int(r["k"]) for r in rows)


def test_sweep_rerun_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(capsys, "sweep", "--preset", "fig4b", "--seed", "5", "--out", str(a))
    run_cli(capsys, "sweep", "--preset", "fig4b", "--seed", "5", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_sweep_overlay_reproducible_and_consistent(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--scheme", "mds", "--k-range", "60:80:10", "--n", "100",
            "--lambda", "1", "--c", "1", "--mu", "1", "--seed", "9",
            "--cycles", "20000"]
    assert run_cli(capsys, *args, "--out", str(a))[0] == 0
    assert run_cli(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    for row in read_rows(a):
        assert row["age_sim_mean"] != ""
        rel = abs(float(row["age_sim_mean"]) - float(row["age_analytic"]))
        assert rel / float(row["age_analytic"]) < 0.02


def test_sweep_custom_range_validation(tmp_path, capsys):
    code, _, err = run_cli(capsys, "sweep", "--scheme", "mds", "--k-range", "90:110",
                           "--n", "100", "--lambda", "1", "--c", "1", "--mu", "1",
                           "--seed", "1", "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "k must be < n" in err
    code, _, err = run_cli(capsys, "sweep", "--scheme", "mds", "--n", "100",
                           "--lambda", "1", "--c", "1", "--mu", "1", "--seed", "1")
    assert code == 2 and "range" in err


def test_csv_number_format_is_twelve_significant_digits(tmp_path, capsys):
    out_path = tmp_path / "f.csv"
    run_cli(capsys, "sweep", "--scheme", "mds", "--k-range", "69:69", "--n", "100",
            "--lambda", "1", "--c", "1", "--mu", "1", "--seed", "1",
            "--out", str(out_path))
    row = read_rows(out_path)[0]
    assert row["age_analytic"] == f"{age_mds(SystemParams(1, 1, 1, 100), 69).delta:.12g}"
    assert "," not in row["age_analytic"]
