import json

import pytest

from aircomp.cli import main

GOOD = """
K: 2
N: 2
L: 2
trials: 2
master_seed: 3
scheme: both
optimizer:
  outer_max_iters: 20
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "experiment.yaml"
    path.write_text(GOOD)
    return path


def test_validate_ok(config_file, capsys):
    assert main(["validate", "--config", str(config_file)]) == 0
    assert "config OK" in capsys.readouterr().out


def test_validate_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("trials: 0\n")
    assert main(["validate", "--config", str(path)]) == 2
    assert "trials" in capsys.readouterr().err


def test_validate_missing_file(capsys):
    assert main(["validate", "--config", "/no/such/file.yaml"]) == 2


def test_run_writes_csv(config_file, tmp_path):
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(config_file),
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("sweep_name,sweep_value,scheme,")
    assert len(lines) == 3  # header + ma + fpa


def test_run_writes_json(config_file, tmp_path):
    out = tmp_path / "out.json"
    assert main(["run", "--config", str(config_file),
                 "--out", str(out), "--format", "json"]) == 0
    records = json.loads(out.read_text())
    assert {r["scheme"] for r in records} == {"ma", "fpa"}


def test_run_stdout_when_no_out(config_file, capsys):
    assert main(["run", "--config", str(config_file)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("sweep_name,")


def test_run_dump_trials(config_file, tmp_path):
    out = tmp_path / "out.csv"
    dump = tmp_path / "trials.json"
    assert main(["run", "--config", str(config_file), "--out", str(out),
                 "--dump-trials", str(dump)]) == 0
    records = json.loads(dump.read_text())
    assert len(records) == 4  # 2 trials x 2 schemes
    assert {"trial", "mse", "positions"} <= set(records[0])


def test_run_seed_and_trials_overrides(config_file, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    c = tmp_path / "c.csv"
    main(["run", "--config", str(config_file), "--out", str(a)])
    main(["run", "--config", str(config_file), "--out", str(b),
          "--seed", "77"])
    main(["run", "--config", str(config_file), "--out", str(c),
          "--trials", "3"])
    assert a.read_text() != b.read_text()
    assert ",3," in c.read_text().splitlines()[1].rsplit(",", 3)[0] \
        or c.read_text().splitlines()[1].split(",")[7] == "3"


def test_run_determinism_byte_identical(config_file, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    main(["run", "--config", str(config_file), "--out", str(a)])
    main(["run", "--config", str(config_file), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_run_bad_config_exit_code(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("unknown_key: 1\n")
    assert main(["run", "--config", str(path)]) == 2


def test_run_runtime_error_exit_code(config_file, tmp_path, capsys):
    target = tmp_path / "missing-dir" / "out.csv"
    assert main(["run", "--config", str(config_file),
                 "--out", str(target)]) == 3
