"""Command-line behaviour: files, exit codes, determinism, env overrides."""

import csv

import pytest
import yaml

from std2d.cli import main

BASE_ARGS = ["--devices", "100", "--file-size", "20kb", "--seed", "3"]


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_expected_files(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", *BASE_ARGS, "--output-dir", str(out)])
    assert code == 0
    rows = read_rows(out / "results.csv")
    assert len(rows) == 1
    assert rows[0]["variant"] == "std2d"
    assert (out / "trace.csv").exists()
    echo = yaml.safe_load((out / "config_echo.yaml").read_text())
    assert echo["n_devices"] == 100
    assert echo["crypto"]["cipher"] == "aes-256-gcm"
    trace_rows = read_rows(out / "trace.csv")
    assert trace_rows and set(trace_rows[0]) == {
        "time_tti", "source", "destination", "variant", "size_bits",
    }


def test_run_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", *BASE_ARGS, "--output-dir", str(out1)]) == 0
    assert main(["run", *BASE_ARGS, "--output-dir", str(out2)]) == 0
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()


def test_bad_malicious_fraction_names_field(tmp_path, capsys):
    code = main(
        ["run", *BASE_ARGS, "--malicious-fraction", "1.5", "--output-dir", str(tmp_path / "x")]
    )
    assert code == 1
    assert "malicious_fraction" in capsys.readouterr().err


def test_env_var_output_dir(tmp_path, monkeypatch):
    target = tmp_path / "envdir"
    monkeypatch.setenv("STD2D_OUTPUT_DIR", str(target))
    assert main(["run", *BASE_ARGS]) == 0
    assert (target / "results.csv").exists()


def test_config_file_plus_override(tmp_path):
    config_path = tmp_path / "cfg.yaml"
    config_path.write_text(
        yaml.safe_dump(
            {
                "n_devices": 90,
                "file_bits": 20_000,
                "variant": "cms",
                "adversary": {"malicious_fraction": 0.2},
            }
        )
    )
    out = tmp_path / "out"
    code = main(
        ["run", "--config", str(config_path), "--variant", "d2d", "--output-dir", str(out)]
    )
    assert code == 0
    rows = read_rows(out / "results.csv")
    assert rows[0]["variant"] == "d2d"  # flag beats file value


def test_validate_config_accepts_and_rejects(tmp_path, capsys):
    good = tmp_path / "good.yaml"
    good.write_text(yaml.safe_dump({"n_devices": 50}))
    assert main(["validate-config", "--config", str(good)]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"n_devices": 50, "variant": "bogus"}))
    assert main(["validate-config", "--config", str(bad)]) == 1
    assert "variant" in capsys.readouterr().err


def test_missing_config_file_is_runtime_error(tmp_path):
    assert main(["validate-config", "--config", str(tmp_path / "nope.yaml")]) == 2


def test_sweep_and_figures_pipeline(tmp_path):
    out = tmp_path / "sweep"
    code = main(
        [
            "sweep",
            "--devices", "100",
            "--file-size", "20kb",
            "--variants", "d2d,sd2d,std2d",
            "--malicious-grid", "0,0.4",
            "--seeds", "1..2",
            "--output-dir", str(out),
        ]
    )
    assert code == 0
    rows = read_rows(out / "results.csv")
    assert len(rows) == 12
    assert (out / "summary.csv").exists()

    figdir = tmp_path / "figs"
    code = main(
        [
            "figures",
            "--results", str(out / "results.csv"),
            "--out-dir", str(figdir),
            "--figures", "fig2,fig3",
            "--no-render",
        ]
    )
    assert code == 0
    assert (figdir / "fig2_wasted_capacity.dat").exists()
    assert (figdir / "fig3_noncorrupted_kbits.dat").exists()

    # missing coverage: fig6 needs unicast rows
    code = main(
        [
            "figures",
            "--results", str(out / "results.csv"),
            "--out-dir", str(figdir),
            "--figures", "fig6",
        ]
    )
    assert code == 2


def test_sweep_rejects_unknown_variant(tmp_path):
    code = main(
        ["sweep", "--variants", "warp", "--output-dir", str(tmp_path / "s")]
    )
    assert code == 1
