import json

import pytest

from QCP.main import main as module_main
from QCP.protocol.errors import ConfigError
from QCP.ui.cli import (BELL_TRIAL_COLUMNS, EXIT_CAPACITY, EXIT_CONFIG, EXIT_OK, TRIAL_COLUMNS, main,
                        parse_list)


def run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out", str(out), "-q"])
    return code, out.read_text(encoding="utf-8") if out.exists() else None


class TestTrialCommands:
    def test_orthogonal_sweep_csv(self, tmp_path):
        code, text = run(tmp_path, "orth.csv", "orthogonal", "--n", "16", "--trials", "17",
                         "--change-point", "sweep", "--format", "csv")
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0] == ",".join(TRIAL_COLUMNS)
        assert len(lines) == 18
        assert lines[3] == "16,3,3,4,1,11,identified"

    def test_repeated_runs_are_byte_identical(self, tmp_path):
        args = ("nonorthogonal", "--n", "12", "--overlap", "0.4", "--trials", "200", "--seed", "77")
        _, first = run(tmp_path, "a.json", *args)
        _, second = run(tmp_path, "b.json", *args)
        _, threaded = run(tmp_path, "c.json", *args, "--workers", "3")
        assert first == second
        assert json.loads(first)["mean_consumed"] == json.loads(threaded)["mean_consumed"]

    def test_bell_csv_header(self, tmp_path):
        code, text = run(tmp_path, "bell.csv", "bell", "--n", "8", "--trials", "20", "--format", "csv")
        assert code == EXIT_OK
        assert text.splitlines()[0] == ",".join(BELL_TRIAL_COLUMNS)

    def test_json_report_has_config(self, tmp_path):
        code, text = run(tmp_path, "bell.json", "bell", "--n", "8", "--trials", "50", "--seed", "1")
        data = json.loads(text)
        assert code == EXIT_OK
        assert data["config"]["regime"] == "bell"
        assert data["config"]["master_seed"] == 1
        assert data["trials"] == 50

    def test_summary_goes_to_stderr(self, tmp_path, capsys):
        main(["orthogonal", "--n", "8", "--trials", "9", "--out", str(tmp_path / "x.json")])
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "ORTHOGONAL trials" in captured.err

    def test_stdout_when_no_out(self, capsys):
        assert main(["orthogonal", "--n", "4", "--trials", "3", "-q"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["trials"] == 3


class TestTableCommands:
    def test_bounds_csv(self, tmp_path):
        code, text = run(tmp_path, "bounds.csv", "bounds", "--n", "16")
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0] == "n,worst,best,worst_closed,best_closed"
        assert lines[-1] == "16,5,4,5,4"

    def test_oracle_json(self, tmp_path):
        code, text = run(tmp_path, "oracle.json", "oracle", "--n", "1,2", "--overlap", "0",
                         "--trials", "0", "--format", "json")
        data = json.loads(text)
        assert code == EXIT_OK
        assert data["table"] == "oracle"
        assert data["rows"][1]["exact_mean"] == pytest.approx(5 / 3)
        assert data["rows"][1]["mc_mean"] is None

    def test_bell_oracle(self, tmp_path):
        code, text = run(tmp_path, "bell_oracle.csv", "oracle", "--bell", "--n", "3")
        assert code == EXIT_OK
        assert text.splitlines()[0].startswith("n,expected_consumed")

    def test_recursion(self, tmp_path):
        code, text = run(tmp_path, "rec.csv", "recursion", "--n", "1,2", "--overlap", "0.5", "--trials", "0")
        assert code == EXIT_OK
        assert len(text.splitlines()) == 3


class TestExitCodes:
    @pytest.mark.parametrize("args", [
        ["orthogonal", "--n", "0"],
        ["orthogonal", "--change-point", "99"],
        ["nonorthogonal", "--overlap", "1.5"],
        ["bell", "--mutation", "4"],
        ["recursion", "--n", "1,x"],
        ["oracle", "--overlap", "2"],
    ])
    def test_invalid_configuration(self, tmp_path, args):
        code, text = run(tmp_path, "bad.out", *args)
        assert code == EXIT_CONFIG
        assert text is None

    def test_missing_config_file(self, tmp_path):
        code, _ = run(tmp_path, "x.json", "orthogonal", "--config", str(tmp_path / "missing.json"))
        assert code == EXIT_CONFIG

    def test_capacity_exceeded(self, tmp_path):
        code, _ = run(tmp_path, "big.csv", "oracle", "--n", "20", "--overlap", "0.3", "--trials", "0")
        assert code == EXIT_CAPACITY
        code, _ = run(tmp_path, "big_bell.csv", "oracle", "--bell", "--n", "11")
        assert code == EXIT_CAPACITY

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["teleport"])
        assert excinfo.value.code == 2


def test_parse_list():
    assert parse_list("1, 2,4", int) == [1, 2, 4]
    with pytest.raises(ConfigError):
        parse_list(",", int)


def test_module_entry_point(capsys):
    assert module_main(["bounds", "--n", "2", "-q"]) == EXIT_OK
    assert capsys.readouterr().out == "n,worst,best,worst_closed,best_closed\n1,1,1,1,1\n2,2,1,2,1\n"
