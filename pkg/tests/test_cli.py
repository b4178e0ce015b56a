import json
import shutil
import subprocess

import pytest

from compser.cli import main
from compser.suites import SuiteConfig, default_config


def test_rates_command(capsys, tmp_path):
    assert main(["rates", "--out", str(tmp_path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert set(rep) >= {"eta", "eta_delta", "lambda", "beta", "lower_bound", "diagnostics"}
    assert rep["beta"] == pytest.approx(0.2)
    assert json.loads((tmp_path / "rates.json").read_text()) == rep


def test_rates_from_config_file(capsys, tmp_path):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"d": 2, "delta": 2.0, "s1": 1.2}))
    assert main(["rates", "--config", str(cfg)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["diagnostics"]["lattice_eta"] == pytest.approx(0.8)


def test_rates_invalid_data(capsys):
    assert main(["rates", "--delta", "0.3"]) == 2
    assert "error: config" in capsys.readouterr().err


def test_show_config_prints_defaults(capsys):
    assert main(["suite", "decay", "--d", "1", "--show-config"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown == default_config("decay", 1).to_dict()


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"cutoff": 7, "seed": 3}))
    assert main(["suite", "model", "--config", str(cfg), "--cutoff", "5", "--s", "1.3",
                 "--show-config"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown["cutoff"] == 5 and shown["seed"] == 3 and shown["s"] == 1.3


def test_config_error_has_field_path(capsys):
    assert main(["suite", "decay", "--d", "1", "--s", "0.2"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: config.s")


def test_unknown_field_rejected(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"cutof": 3}))
    assert main(["suite", "rates", "--config", str(cfg)]) == 2
    assert "config.cutof" in capsys.readouterr().err


def test_config_round_trip():
    cfg = default_config("vanishing", 2)
    assert SuiteConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_suite_rates_report(capsys, tmp_path):
    assert main(["suite", "rates", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert all(line.startswith("PASS") for line in out.strip().splitlines())
    rep = json.loads((tmp_path / "rates.json").read_text())
    assert rep["suite"] == "rates" and rep["pass"] is True
    assert set(rep["cases"][0]) == {"name", "pass", "measured", "target", "tolerance"}


def test_suite_exit_code_on_failure(capsys, tmp_path):
    cfg = tmp_path / "strict.json"
    cfg.write_text(json.dumps({"tolerances": {"lambda": 0.0}}))
    assert main(["suite", "rates", "--config", str(cfg)]) == 1
    assert "FAIL  rates.lambda_vs_grid_d1" in capsys.readouterr().out
    cfg.write_text(json.dumps({"tolerances": {"lambda": -1.0}}))
    assert main(["suite", "rates", "--config", str(cfg)]) == 2
    assert "config.tolerances.lambda" in capsys.readouterr().err


@pytest.mark.parametrize("kind", ["cfun", "scalars", "matcoef"])
def test_tables_are_deterministic(kind, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["table", kind, "--out", str(a)]) == 0
    assert main(["table", kind, "--out", str(b)]) == 0
    capsys.readouterr()
    first = (a / f"{kind}.csv").read_bytes()
    assert first == (b / f"{kind}.csv").read_bytes()
    assert first.count(b"\n") > 2


def test_cfun_table_columns(tmp_path, capsys):
    main(["table", "cfun", "--out", str(tmp_path)])
    lines = (tmp_path / "cfun.csv").read_text().splitlines()
    assert lines[0] == "d,s,computed,closed_form,abs_error"
    assert all(float(row.split(",")[-1]) < 1e-6 for row in lines[1:])


@pytest.mark.skipif(shutil.which("compser-lab") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["compser-lab", "rates"], capture_output=True, text=True, timeout=60)
    assert res.returncode == 0
    assert "lower_bound" in res.stdout
