import dataclasses
import json
import pathlib

import pytest

from recommerce import canonical_params, params_to_dict
from recommerce.cli import CONFIG_SCHEMA, OUT_ENV_VAR, main
from recommerce.reporting import (
    AUDIT_COLUMNS,
    OLG_COLUMNS,
    SWEEP_COLUMNS,
    TWO_PERIOD_COLUMNS,
    VERIFY_COLUMNS,
)

SMALL_VERIFY = [
    "--seed", "7",
    "--draws", "6",
    "--foc-draws", "2",
    "--grid-points", "5000",
    "--audit-draws", "2",
    "--commission-points", "51",
]


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def write_config(tmp_path, **extra):
    payload = {"schema": CONFIG_SCHEMA, **extra}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return str(path)


# ----------------------------------------------------------------------
# solve
# ----------------------------------------------------------------------


def test_solve_defaults(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["solve", "--out", str(out)]) == 0
    header, rows = read_csv(out / "two_period.csv")
    assert header == list(TWO_PERIOD_COLUMNS)
    assert [r[0] for r in rows] == ["third-party", "branded"]
    assert not (out / "olg.csv").exists()
    payload = json.loads((out / "solution.json").read_text())
    assert payload["params"]["v_L"] == 0.8
    assert "two_period" in payload and "olg" not in payload
    assert "wrote" in capsys.readouterr().out


def test_solve_both_models_flags_shutdown(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["solve", "--model", "both", "--out", str(out)]) == 0
    header, rows = read_csv(out / "olg.csv")
    assert header == list(OLG_COLUMNS)
    assert all(r[1] == "shutdown" for r in rows)
    assert "market shutdown" in capsys.readouterr().out


def test_solve_single_regime(tmp_path):
    out = tmp_path / "run"
    assert main(["solve", "--regime", "branded", "--out", str(out)]) == 0
    _, rows = read_csv(out / "two_period.csv")
    assert len(rows) == 1
    assert rows[0][0] == "branded"


def test_solve_param_flags_override(tmp_path):
    out = tmp_path / "run"
    assert main(["solve", "--v-l", "0.4", "--out", str(out)]) == 0
    _, rows = read_csv(out / "two_period.csv")
    assert all(r[1] == "shutdown" for r in rows)


def test_solve_rejects_bad_params(tmp_path, capsys):
    assert main(["solve", "--v-l", "1.5", "--out", str(tmp_path / "x")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "valuations_ordered" in err


def test_population_flag_keeps_masses_consistent(tmp_path):
    out = tmp_path / "run"
    assert main(["solve", "--n-h", "0.4", "--out", str(out)]) == 0
    payload = json.loads((out / "solution.json").read_text())
    assert payload["params"]["n_H"] == 0.4
    assert payload["params"]["n_L"] == 0.6


# ----------------------------------------------------------------------
# config handling
# ----------------------------------------------------------------------


def test_config_supplies_params(tmp_path):
    params = dataclasses.replace(canonical_params(), v_L=0.75)
    cfg = write_config(tmp_path, params=params_to_dict(params))
    out = tmp_path / "run"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    payload = json.loads((out / "solution.json").read_text())
    assert payload["params"]["v_L"] == 0.75


def test_flags_beat_config(tmp_path):
    cfg = write_config(tmp_path, params=params_to_dict(canonical_params()))
    out = tmp_path / "run"
    assert main(["solve", "--config", cfg, "--v-l", "0.85", "--out", str(out)]) == 0
    payload = json.loads((out / "solution.json").read_text())
    assert payload["params"]["v_L"] == 0.85


def test_shipped_config_loads(tmp_path):
    shipped = pathlib.Path(__file__).resolve().parent.parent / "configs" / "canonical.json"
    assert main(["solve", "--config", str(shipped),
                 "--out", str(tmp_path / "run")]) == 0


@pytest.mark.parametrize(
    "content",
    [
        "not json at all",
        '["a", "list"]',
        '{"schema": "recommerce-config/1", "mystery": 1}',
        '{"schema": "recommerce-config/2"}',
        '{"params": {}}',
        '{"schema": "recommerce-config/1", "solver": {"granularity": 9}}',
    ],
)
def test_config_rejection(tmp_path, capsys, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "x")]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_config_file(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["solve", "--config", missing, "--out", str(tmp_path / "x")]) == 2
    assert "not found" in capsys.readouterr().err


def test_out_dir_env_var(tmp_path, monkeypatch):
    env_dir = tmp_path / "from_env"
    monkeypatch.setenv(OUT_ENV_VAR, str(env_dir))
    assert main(["solve"]) == 0
    assert (env_dir / "solution.json").exists()


def test_out_flag_beats_env(tmp_path, monkeypatch):
    env_dir = tmp_path / "from_env"
    flag_dir = tmp_path / "from_flag"
    monkeypatch.setenv(OUT_ENV_VAR, str(env_dir))
    assert main(["solve", "--out", str(flag_dir)]) == 0
    assert (flag_dir / "solution.json").exists()
    assert not env_dir.exists()


def test_env_beats_config_out_dir(tmp_path, monkeypatch):
    cfg_dir = tmp_path / "from_cfg"
    env_dir = tmp_path / "from_env"
    cfg = write_config(tmp_path, out_dir=str(cfg_dir))
    monkeypatch.setenv(OUT_ENV_VAR, str(env_dir))
    assert main(["solve", "--config", cfg]) == 0
    assert (env_dir / "solution.json").exists()
    assert not cfg_dir.exists()


# ----------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------


def test_sweep_via_flags(tmp_path):
    out = tmp_path / "run"
    rc = main([
        "sweep", "--parameter", "beta", "--start", "0", "--stop", "0.3",
        "--steps", "4", "--regime", "branded", "--out", str(out),
    ])
    assert rc == 0
    header, rows = read_csv(out / "sweep.csv")
    assert header == list(SWEEP_COLUMNS)
    assert len(rows) == 4
    verdicts = json.loads((out / "sweep_verdicts.json").read_text())
    assert verdicts["reports"][0]["verdicts"]["durability"] == "strictly-decreasing"
    assert verdicts["reports"][0]["verdicts"]["profit"] == "strictly-decreasing"


def test_sweep_via_config_block(tmp_path):
    cfg = write_config(
        tmp_path,
        sweep={"parameter": "alpha", "start": 0.8, "stop": 1.0, "steps": 5},
    )
    out = tmp_path / "run"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    _, rows = read_csv(out / "sweep.csv")
    assert len(rows) == 10  # both regimes
    verdicts = json.loads((out / "sweep_verdicts.json").read_text())
    assert all(
        r["verdicts"]["durability"] == "strictly-increasing"
        for r in verdicts["reports"]
    )


def test_sweep_requires_grid_arguments(tmp_path, capsys):
    assert main(["sweep", "--out", str(tmp_path / "x")]) == 2
    assert "--parameter" in capsys.readouterr().err


def test_sweep_empty_active_region(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main([
        "sweep", "--parameter", "alpha", "--start", "0.5", "--stop", "0.55",
        "--steps", "3", "--out", str(out),
    ])
    assert rc == 2
    assert "empty active region" in capsys.readouterr().err
    # the table is still written for inspection
    assert (out / "sweep.csv").exists()


# ----------------------------------------------------------------------
# compare
# ----------------------------------------------------------------------


def test_compare(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["compare", "--out", str(out)]) == 0
    payload = json.loads((out / "compare.json").read_text())
    assert payload["comparison"]["d_durability"] > 0
    assert payload["comparison"]["both_active_two_period"] is True
    assert "dD=" in capsys.readouterr().out


# ----------------------------------------------------------------------
# olg-verify
# ----------------------------------------------------------------------


def test_olg_verify_needs_durability_in_shutdown(tmp_path, capsys):
    assert main(["olg-verify", "--out", str(tmp_path / "x")]) == 2
    assert "--durability" in capsys.readouterr().err


def test_olg_verify_at_chosen_durability(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["olg-verify", "--durability", "0.12", "--out", str(out)]) == 0
    header, rows = read_csv(out / "olg_audit.csv")
    assert header == list(AUDIT_COLUMNS)
    assert len(rows) == 243
    assert "unique steady state" in capsys.readouterr().out
    assert not (out / "olg_audit_counterexample.json").exists()


def test_olg_verify_rejects_nonpositive_durability(tmp_path, capsys):
    assert main(["olg-verify", "--durability", "-1",
                 "--out", str(tmp_path / "x")]) == 2
    assert "positive" in capsys.readouterr().err


def test_olg_verify_reports_uniqueness_failure(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main([
        "olg-verify", "--v-l", "0.95", "--alpha", "0.95", "--beta", "0.2",
        "--delta", "0.5", "--out", str(out),
    ])
    assert rc == 1
    assert "FAILED" in capsys.readouterr().err
    payload = json.loads((out / "olg_audit_counterexample.json").read_text())
    assert payload["survivors"] == []
    assert (out / "olg_audit.csv").exists()


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------


def test_verify_small_scale(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["verify", *SMALL_VERIFY, "--out", str(out)]) == 0
    header, rows = read_csv(out / "verify.csv")
    assert header == list(VERIFY_COLUMNS)
    assert len(rows) == 9
    assert all(r[3] == "pass" for r in rows)
    payload = json.loads((out / "verify.json").read_text())
    assert payload["seed"] == 7
    assert len(payload["results"]) == 9
    assert capsys.readouterr().out.count("PASS") == 9
    assert not (out / "counterexample.json").exists()


def test_verify_is_byte_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["verify", *SMALL_VERIFY, "--out", str(out1)]) == 0
    assert main(["verify", *SMALL_VERIFY, "--out", str(out2)]) == 0
    for name in ("verify.csv", "verify.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_verify_parallel_matches_serial_output(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["verify", *SMALL_VERIFY, "--out", str(out1)]) == 0
    assert main(["verify", *SMALL_VERIFY, "--jobs", "2", "--out", str(out2)]) == 0
    assert (out1 / "verify.csv").read_bytes() == (out2 / "verify.csv").read_bytes()


def test_verify_inject_failure(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["verify", *SMALL_VERIFY, "--inject-failure", "--out", str(out)])
    assert rc == 1
    assert "FAIL injected-failure-probe" in capsys.readouterr().out
    payload = json.loads((out / "counterexample.json").read_text())
    assert payload[0]["property"] == "injected-failure-probe"


def test_verify_rejects_bad_scales(tmp_path, capsys):
    assert main(["verify", "--draws", "0", "--out", str(tmp_path / "x")]) == 2
    assert main(["verify", "--grid-points", "500", "--out", str(tmp_path / "y")]) == 2
    assert capsys.readouterr().err.count("error:") == 2


def test_verify_scales_from_config(tmp_path):
    cfg = write_config(
        tmp_path,
        verification={
            "seed": 7, "draws": 6, "foc_draws": 2, "grid_points": 5000,
            "audit_draws": 2, "commission_points": 51,
        },
    )
    out = tmp_path / "run"
    assert main(["verify", "--config", cfg, "--draws", "5", "--out", str(out)]) == 0
    payload = json.loads((out / "verify.json").read_text())
    assert payload["scales"]["draws"] == 5  # flag wins
    assert payload["scales"]["grid_points"] == 5000  # config fills the rest


# ----------------------------------------------------------------------
# oracle-check
# ----------------------------------------------------------------------


def test_oracle_check(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["oracle-check", "--grid-points", "20000", "--out", str(out)]) == 0
    payload = json.loads((out / "oracle_check.json").read_text())
    assert payload["ok"] is True
    assert payload["worst_gap"] <= payload["grid_step"]
    assert len(payload["entries"]) == 4
    assert "gap=" in capsys.readouterr().out


def test_oracle_check_rejects_coarse_grid(tmp_path, capsys):
    assert main(["oracle-check", "--grid-points", "10",
                 "--out", str(tmp_path / "x")]) == 2
    assert "at least 1000" in capsys.readouterr().err
