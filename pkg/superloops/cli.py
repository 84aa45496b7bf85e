from __future__ import annotations

import logging
import sys
import time
from pathlib import Path
from typing import List, Sequence

from watchdog.observers import Observer

from . import commands
from .config import Config
from .constants import LOOP_DELAY, SCRIPT_SUFFIX, VERSION
from .environment import Environment
from .errors import ScriptError, SuperloopsError
from .event_handler import EventHandler
from .parse import parse_arguments
from .report import Report, golden_diff, write_golden
from .script import parse
from .trigger import Trigger

logging.basicConfig(level=logging.INFO, format="[superloops] %(message)s")


def error_message(path: Path, exc: SuperloopsError) -> str:
    if isinstance(exc, ScriptError) and exc.line is not None:
        return f"{path}:{exc}"
    return f"{path}: {exc}"


def run_script(path: Path, config: Config) -> Report:
    started = time.perf_counter()
    script = parse(path.read_text(encoding="utf-8"))
    env = Environment(script, nil_order=config.nil_order, twin_cap=config.twin_cap)
    report = commands.Manager.run_command(env, script.command, config)
    report.path = path
    report.timing = time.perf_counter() - started
    return report


def find_scripts(path: Path) -> List[Path]:
    if path.is_dir():
        return sorted(path.rglob(f"*{SCRIPT_SUFFIX}"))
    return [path]


def _emit(report: Report, config: Config) -> None:
    if config.json:
        sys.stdout.write(report.to_json(config.timing))
    else:
        sys.stdout.write(report.to_text(config.timing))


def _golden(report: Report, config: Config) -> bool:
    if config.golden is None:
        return True
    if config.update_golden:
        target = write_golden(report, config.golden)
        logging.info(f"wrote {target}")
        return True
    diff = golden_diff(report, config.golden)
    if diff:
        logging.error(f"{report.path} differs from its golden report")
        sys.stderr.write("".join(diff))
    return not diff


def execute(paths: Sequence[Path], config: Config, keep_going: bool = False) -> bool:
    """Run every script; True iff all of them ran and passed every check.

    Without ``keep_going`` the first script error ends the process.
    """
    passed = True
    for path in paths:
        logging.info(f"running {path}")
        try:
            report = run_script(path, config)
        except SuperloopsError as exc:
            if not keep_going:
                raise SystemExit(error_message(path, exc))
            logging.error(error_message(path, exc))
            passed = False
            continue
        _emit(report, config)
        passed = _golden(report, config) and report.passed and passed
        logging.info(f"{path}: {'passed' if report.passed else 'failed'}")
    return passed


def main_loop(trigger: Trigger, config: Config) -> None:
    if trigger.check():
        changed = trigger.release()
        if config.path.is_dir():
            paths = [p for p in changed if p.exists()] or find_scripts(config.path)
        else:
            paths = [config.path]
        execute(paths, config, keep_going=True)

    time.sleep(LOOP_DELAY)


def watch(config: Config) -> None:
    trigger = Trigger(config.delay)
    event_handler = EventHandler(
        trigger, patterns=config.patterns, ignore_patterns=config.ignore_patterns
    )
    watched = config.path if config.path.is_dir() else config.path.parent

    observer = Observer()
    observer.schedule(event_handler, watched, recursive=True)
    observer.start()

    logging.info(f"superloops version {VERSION}")
    logging.info(f"Waiting for file changes in {watched.absolute()}")
    trigger.emit_now()

    try:
        while True:
            main_loop(trigger, config)
    finally:
        observer.stop()
        observer.join()


def run() -> int:
    namespace = parse_arguments(sys.argv[1:])
    config = Config.create(namespace=namespace)
    if config.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    if not config.path.exists():
        raise SystemExit(f"{config.path}: no such file or directory")

    if config.watch:
        watch(config)
        return 0

    scripts = find_scripts(config.path)
    return 0 if execute(scripts, config, keep_going=config.path.is_dir()) else 1
