import json
import sys
from pathlib import Path
from unittest.mock import MagicMock

import pytest
from freezegun import freeze_time
from pytest_mock.plugin import MockerFixture

from superloops import cli
from superloops.config import Config
from superloops.constants import LOOP_DELAY
from superloops.trigger import Trigger

CLOSED_SCRIPT = "even x1 x2;\nform w = d(x1^2 * d x2);\ncheck closed w;\n"
OPEN_SCRIPT = "even x1 x2;\nform w = x1 * d x2;\ncheck closed w;\n"


@freeze_time("2020-01-01 00:00:00")
def test_main_loop_does_not_run_without_trigger(
    mock_execute: MagicMock,
    mock_time_sleep: MagicMock,
    config: Config,
    trigger: Trigger,
):
    cli.main_loop(trigger, config)

    mock_execute.assert_not_called()
    mock_time_sleep.assert_called_once_with(LOOP_DELAY)


@freeze_time("2020-01-01 00:00:00")
def test_main_loop_does_not_run_before_delay(
    mock_execute: MagicMock,
    mock_time_sleep: MagicMock,
    config: Config,
):
    trigger = Trigger(delay=5)
    trigger.emit()

    with freeze_time("2020-01-01 00:00:04"):
        cli.main_loop(trigger, config)

    mock_execute.assert_not_called()
    mock_time_sleep.assert_called_once_with(LOOP_DELAY)

    assert trigger.is_active()


@freeze_time("2020-01-01 00:00:00")
def test_main_loop_runs_changed_scripts_after_delay(
    mock_execute: MagicMock,
    mock_time_sleep: MagicMock,
    tmp_path: Path,
    write_script,
):
    script = write_script("changed.sl", CLOSED_SCRIPT)
    config = Config(path=tmp_path)
    trigger = Trigger(delay=5)
    trigger.emit(script)

    with freeze_time("2020-01-01 00:00:06"):
        cli.main_loop(trigger, config)

    mock_execute.assert_called_once_with([script], config, keep_going=True)
    mock_time_sleep.assert_called_once_with(LOOP_DELAY)

    assert not trigger.is_active()


@freeze_time("2020-01-01 00:00:00")
def test_main_loop_reruns_single_script(
    mock_execute: MagicMock, tmp_path: Path, write_script
):
    script = write_script("single.sl", CLOSED_SCRIPT)
    config = Config(path=script)
    trigger = Trigger()
    trigger.emit(tmp_path.joinpath("other.sl"))

    with freeze_time("2020-01-01 00:00:01"):
        cli.main_loop(trigger, config)

    mock_execute.assert_called_once_with([script], config, keep_going=True)


def test_run_script_builds_report(tmp_path: Path, write_script, config: Config):
    script = write_script("closed.sl", CLOSED_SCRIPT)

    report = cli.run_script(script, config)

    assert report.passed
    assert report.path == script
    assert report.command == "check closed w;"
    assert report.timing is not None


def test_execute_prints_json(
    tmp_path: Path, write_script, capsys: pytest.CaptureFixture
):
    script = write_script("closed.sl", CLOSED_SCRIPT)
    config = Config(path=script, json=True)

    assert cli.execute([script], config) is True

    data = json.loads(capsys.readouterr().out)
    assert data["passed"] is True
    assert data["results"]["d"] == "0"
    assert "timing" not in data


def test_execute_reports_failed_checks(write_script, capsys: pytest.CaptureFixture):
    script = write_script("open.sl", OPEN_SCRIPT)

    assert cli.execute([script], Config(path=script)) is False
    assert "[FAIL] closed" in capsys.readouterr().out


def test_script_errors_exit_with_position(write_script):
    script = write_script("broken.sl", "even x1;\nform w = x1 * y;\ncheck closed w;\n")

    with pytest.raises(SystemExit, match=r"broken\.sl:2:15: 'y' is not declared"):
        cli.execute([script], Config(path=script))


def test_script_errors_are_logged_in_suites(write_script, capsys: pytest.CaptureFixture):
    broken = write_script("broken.sl", "even x1;\ncheck closed w\n")
    good = write_script("good.sl", CLOSED_SCRIPT)

    assert cli.execute([broken, good], Config(path=good), keep_going=True) is False
    assert "[PASS] closed" in capsys.readouterr().out


def test_golden_update_then_compare(tmp_path: Path, write_script):
    script = write_script("golden.sl", CLOSED_SCRIPT)
    golden = tmp_path.joinpath("golden")
    config = Config(path=script, golden=golden, update_golden=True)

    assert cli.execute([script], config) is True
    stored = golden.joinpath("golden.json")
    assert stored.exists()

    config.update_golden = False
    assert cli.execute([script], config) is True

    stored.write_text("{}\n")
    assert cli.execute([script], config) is False

    stored.unlink()
    golden.rmdir()


def test_run_exit_status(mocker: MockerFixture, write_script):
    closed = write_script("closed.sl", CLOSED_SCRIPT)
    mocker.patch.object(sys, "argv", ["superloops", str(closed)])
    assert cli.run() == 0

    failing = write_script("open.sl", OPEN_SCRIPT)
    mocker.patch.object(sys, "argv", ["superloops", str(failing)])
    assert cli.run() == 1


def test_run_suite_runs_every_script(
    mocker: MockerFixture, mock_execute: MagicMock, tmp_path: Path, write_script
):
    first = write_script("a.sl", CLOSED_SCRIPT)
    second = write_script("b.sl", OPEN_SCRIPT)
    mocker.patch.object(sys, "argv", ["superloops", str(tmp_path)])

    assert cli.run() == 0

    paths, _ = mock_execute.call_args[0]
    assert paths == [first, second]
    assert mock_execute.call_args[1] == {"keep_going": True}


def test_run_missing_path(mocker: MockerFixture):
    mocker.patch.object(sys, "argv", ["superloops", "missing/script.sl"])

    with pytest.raises(SystemExit, match="no such file or directory"):
        cli.run()


def assert_observer_started(mock_observer: MagicMock, expected_path: Path):
    mock_observer.assert_called_once_with()
    observer_instance = mock_observer.return_value
    observer_instance.schedule.assert_called_once()
    observer_instance.start.assert_called_once()

    path = mock_observer.return_value.schedule.call_args[0][1]
    assert path == expected_path


def test_watch_starts_the_observer_and_main_loop(
    mocker: MockerFixture,
    mock_observer: MagicMock,
    mock_main_loop: MagicMock,
):
    mocker.patch.object(sys, "argv", ["superloops", ".", "--watch"])

    with pytest.raises(InterruptedError):
        cli.run()

    assert_observer_started(mock_observer, Path("."))
    mock_main_loop.assert_called_once()
    mock_observer.return_value.stop.assert_called_once()


def test_watch_runs_right_away(
    mocker: MockerFixture,
    mock_observer: MagicMock,
    mock_main_loop: MagicMock,
):
    mock_emit = mocker.patch("superloops.cli.Trigger.emit_now", autospec=True)
    mocker.patch.object(sys, "argv", ["superloops", ".", "--watch"])

    with pytest.raises(InterruptedError):
        cli.run()

    mock_emit.assert_called_once()


def test_watch_single_script_observes_its_directory(
    mocker: MockerFixture,
    mock_observer: MagicMock,
    mock_main_loop: MagicMock,
    tmp_path: Path,
    write_script,
):
    script = write_script("watched.sl", CLOSED_SCRIPT)
    mocker.patch.object(sys, "argv", ["superloops", str(script), "--watch"])

    with pytest.raises(InterruptedError):
        cli.run()

    assert_observer_started(mock_observer, tmp_path)


def test_patterns_and_ignore_patterns_are_passed_to_event_handler(
    mocker: MockerFixture,
    mock_observer: MagicMock,
    mock_main_loop: MagicMock,
):
    args = [
        "superloops",
        ".",
        "--watch",
        "--patterns",
        "*.sl,*.toml",
        "--ignore-patterns",
        "draft.sl",
    ]
    mocker.patch.object(sys, "argv", args)

    with pytest.raises(InterruptedError):
        cli.run()

    event_handler = mock_observer.return_value.schedule.call_args[0][0]

    assert event_handler.patterns == ["*.sl", "*.toml"]
    assert event_handler.ignore_patterns == ["draft.sl"]
