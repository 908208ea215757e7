import pathlib

import numpy as np
import pytest
from click.testing import CliRunner

from inavfiter.__main__ import cli
from inavfiter._cli.exc import EXIT_DIVERGED, EXIT_FAILURE
from inavfiter.dataset import read_dataset, write_dataset
from inavfiter.harness.output import SUMMARY_FILE
from inavfiter.imu import ImuBatch


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def test_simulate(runner, tmp_path: pathlib.Path):
    out = tmp_path / "out"
    result = runner.invoke(
        cli,
        [
            "simulate",
            "--duration",
            "0.5",
            "--algorithms",
            "typical2,inavfiter",
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (out / "typical2.csv").is_file()
    assert (out / "inavfiter.csv").is_file()
    assert not (out / "improved2.csv").exists()
    lines = (out / SUMMARY_FILE).read_text().splitlines()
    assert lines[0].startswith("typical2,coning,perfect,")
    assert lines[1].startswith("inavfiter,coning,perfect,")


def test_settings_file(runner, tmp_path: pathlib.Path):
    out = tmp_path / "from-settings"
    config = tmp_path / "settings.yaml"
    config.write_text("outputDir: %s\nmaxWorkers: 1\n" % out)
    result = runner.invoke(
        cli,
        ["-c", str(config), "simulate", "--duration", "0.2", "--trajectory", "level"],
    )
    assert result.exit_code == 0, result.output
    assert (out / SUMMARY_FILE).read_text().startswith("inavfiter,level,")


def test_invalid_settings_file(runner, tmp_path: pathlib.Path):
    config = tmp_path / "settings.yaml"
    config.write_text("maxWorkers: -1\n")
    result = runner.invoke(cli, ["-c", str(config), "simulate"])
    assert result.exit_code == 1
    assert "Invalid configuration input" in result.output


def test_export_then_replay(runner, tmp_path: pathlib.Path):
    dataset = tmp_path / "coning.csv"
    result = runner.invoke(
        cli,
        ["export-dataset", "--duration", "0.5", "--block", "8", "--out", str(dataset)],
    )
    assert result.exit_code == 0, result.output
    header, batch = read_dataset(dataset)
    assert header.mode == "coning"
    assert batch.n_samples == 48

    out = tmp_path / "out"
    result = runner.invoke(
        cli, ["simulate", "--dataset", str(dataset), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert len((out / "inavfiter.csv").read_text().splitlines()) == 8


def test_bad_sensors(runner, tmp_path: pathlib.Path):
    result = runner.invoke(
        cli, ["simulate", "--sensors", "tactical", "--out", str(tmp_path)]
    )
    assert result.exit_code == 2
    assert "tactical" in result.output


def test_bad_algorithms(runner, tmp_path: pathlib.Path):
    result = runner.invoke(
        cli, ["simulate", "--algorithms", "inavfiter,rk4", "--out", str(tmp_path)]
    )
    assert result.exit_code == 2


def test_sensor_file(runner, tmp_path: pathlib.Path):
    spec = tmp_path / "mems.yaml"
    spec.write_text("gyroBias: 1e-5\naccelBias: 1e-3\n")
    out = tmp_path / "out"
    result = runner.invoke(
        cli,
        [
            "simulate",
            "--duration",
            "0.2",
            "--algorithms",
            "typical2",
            "--sensors",
            "file:%s" % spec,
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (out / SUMMARY_FILE).read_text().startswith("typical2,coning,mems,")


def test_manifest_overrides_flags(runner, tmp_path: pathlib.Path):
    out = tmp_path / "out"
    manifest = tmp_path / "experiment.yaml"
    manifest.write_text(
        "trajectory:\n  duration: 0.2\nalgorithms: [improved2]\nsensorLabel: lab\n"
    )
    result = runner.invoke(
        cli,
        ["simulate", "--manifest", str(manifest), "--duration", "5", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    summary = (out / SUMMARY_FILE).read_text().splitlines()
    assert summary[0].startswith("improved2,coning,lab,")
    rows = np.loadtxt(out / "improved2.csv", delimiter=",", skiprows=1)
    assert rows[-1, 0] == pytest.approx(0.16)


@pytest.mark.parametrize(
    "text", ["algorithms: [rk4]\n", "- not a mapping\n", "trajectory: {mode: [\n"]
)
def test_bad_manifest(runner, tmp_path: pathlib.Path, text):
    manifest = tmp_path / "experiment.yaml"
    manifest.write_text(text)
    result = runner.invoke(
        cli, ["simulate", "--manifest", str(manifest), "--out", str(tmp_path)]
    )
    assert result.exit_code == EXIT_FAILURE
    assert "experiment.yaml" in result.output


def test_diverging_dataset(runner, tmp_path: pathlib.Path):
    dataset = tmp_path / "coning.csv"
    runner.invoke(
        cli,
        ["export-dataset", "--duration", "0.32", "--block", "8", "--out", str(dataset)],
    )
    _, batch = read_dataset(dataset)
    gyro = batch.gyro.copy()
    gyro[20] = np.nan
    write_dataset(
        dataset,
        ImuBatch(batch.t_start, batch.t_span, gyro, batch.accel),
        100.0,
        "coning",
    )

    out = tmp_path / "out"
    result = runner.invoke(
        cli, ["simulate", "--dataset", str(dataset), "--out", str(out)]
    )
    assert result.exit_code == EXIT_DIVERGED
    assert "Diverged: inavfiter, typical2, improved2" in result.output
    assert (out / SUMMARY_FILE).is_file()


def test_missing_output_option(runner):
    result = runner.invoke(cli, ["export-dataset"])
    assert result.exit_code == 2
