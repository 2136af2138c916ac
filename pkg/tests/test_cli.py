import io
import subprocess
import sys

import pytest
import yaml

from xrorch.cli import EXIT_INVALID, EXIT_OK, EXIT_PATH, EXIT_RUNTIME, EXIT_USAGE, main
from xrorch.scenario import OUTPUT_DIR_ENV, reference_scenario_path

REF = str(reference_scenario_path())


def _main(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_validate_ok():
    code, text = _main("validate", REF)
    assert code == EXIT_OK
    assert "6 nodes, 9 users" in text


def test_missing_file():
    assert _main("validate", "does/not/exist.scenario")[0] == EXIT_PATH


def test_invalid_scenario(tmp_path):
    doc = yaml.safe_load(reference_scenario_path().read_text())
    doc["score_tables"]["weights"]["w_i"] = 0.4
    p = tmp_path / "bad.scenario"
    p.write_text(yaml.safe_dump(doc))
    assert _main("validate", str(p))[0] == EXIT_INVALID


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == EXIT_USAGE


def test_step_out_of_range():
    assert _main("score", REF, "--at-step", "99")[0] == EXIT_RUNTIME


def test_unknown_placement():
    assert _main("explain", REF, "--at-step", "1", "--placement", "PL42")[0] == EXIT_RUNTIME


def test_run_writes_files(tmp_path):
    code, _ = _main("run", REF, "--out", str(tmp_path), "--format", "csv")
    assert code == EXIT_OK
    assert (tmp_path / "summary.csv").exists()
    assert not (tmp_path / "report.json").exists()


def test_run_honours_output_env(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "o"))
    assert _main("run", REF)[0] == EXIT_OK
    assert (tmp_path / "o" / "report.json").exists()


def test_score_marks_chosen_and_reason():
    code, text = _main("score", REF, "--at-step", "5")
    assert code == EXIT_OK
    assert "PL4*" in text
    assert "RAC: E2 demand 23 vCPU" in text


def test_explain_breakdown():
    code, text = _main("explain", REF, "--at-step", "1", "--placement", "PL5")
    assert code == EXIT_OK
    assert "qos_norm  = 0.3800" in text
    assert "F         = 0.3139" in text


def test_console_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "xrorch.cli", "validate", REF], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("ok:")
