"""
Tests for the lorentz-lab command line
"""

import csv
import json

from lorentz_lab.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, main


def write_config(tmp_path, payload) -> str:
    path = tmp_path / "config.json"
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
    return str(path)


def test_passing_run_prints_report_and_csv(tmp_path, capsys):
    """Test exit code 0, the JSON report on stdout and the CSV rows"""
    config = write_config(tmp_path, {"seed": 4, "dims": 3, "trials": 3})
    csv_path = tmp_path / "trials.csv"

    assert main(["steinhaus", "--config", config, "--csv", str(csv_path)]) == EXIT_PASS

    report = json.loads(capsys.readouterr().out)
    assert report["experiment"] == "steinhaus"
    assert report["aggregate"]["pass"] is True
    assert set(report["aggregate"]) >= {"max_defect", "pass", "wall_ms"}
    assert len(report["trials"]) == 3

    with csv_path.open(encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["trial", "defect", "bound", "pass"]
    assert len(rows) == 4
    assert rows[-1][1] == ""


def test_failing_run_exits_with_one(tmp_path):
    """Test exit code 1 when a trial misses its bound"""
    config = write_config(tmp_path, {"dims": 2, "trials": 1, "t": 0.01, "resolutions": [0.02, 0.01]})
    assert main(["no-dense-conjugacy", "--config", config]) == EXIT_FAIL


def test_config_errors_exit_with_two(tmp_path, capsys):
    """Test unknown keys, malformed JSON, missing files and invalid parameters"""
    unknown = write_config(tmp_path, {"seed": 1, "colour": "blue"})
    assert main(["steinhaus", "--config", unknown]) == EXIT_CONFIG
    assert "[error]" in capsys.readouterr().err

    broken = write_config(tmp_path, "{not json")
    assert main(["steinhaus", "--config", broken]) == EXIT_CONFIG

    assert main(["steinhaus", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG

    not_object = write_config(tmp_path, "[1, 2]")
    assert main(["steinhaus", "--config", not_object]) == EXIT_CONFIG

    flat = write_config(tmp_path, {"dims": 2})
    assert main(["steinhaus", "--config", flat]) == EXIT_CONFIG

    zero_length = write_config(tmp_path, {"t": 0.0})
    assert main(["no-dense-conjugacy", "--config", zero_length]) == EXIT_CONFIG
