"""Deterministic report model with JSON and text renderings."""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .superalg import SuperPoly


def serialize(value: Any) -> Any:
    """Canonical JSON-ready form: polynomials and rationals become strings."""
    if isinstance(value, (SuperPoly, Fraction)):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Mapping):
        return {_key(k): serialize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [serialize(v) for v in value]
    return str(value)


def _key(key: Any) -> str:
    if isinstance(key, tuple):
        return ",".join(str(k) for k in key)
    return str(key)


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "details": list(self.details)}


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)
    timing: Optional[float] = None
    path: Optional[Path] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str, passed: bool, details: Optional[List[str]] = None) -> None:
        self.checks.append(CheckResult(name, passed, details or []))

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "command": self.command,
            "inputs": serialize(self.inputs),
            "results": serialize(self.results),
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
        if timing and self.timing is not None:
            data["timing"] = round(self.timing, 3)
        return data

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2) + "\n"

    def to_text(self, timing: bool = False) -> str:
        lines = [f"command: {self.command}"]
        data = self.to_dict(timing)
        for section in ("inputs", "results"):
            if data[section]:
                lines.append(f"{section}:")
                lines.extend(_text_lines(data[section], 1))
        for check in self.checks:
            lines.append(f"[{'PASS' if check.passed else 'FAIL'}] {check.name}")
            lines.extend(f"    {detail}" for detail in check.details)
        if "timing" in data:
            lines.append(f"timing: {data['timing']}s")
        lines.append("passed" if self.passed else "failed")
        return "\n".join(lines) + "\n"


def _text_lines(value: Any, depth: int) -> List[str]:
    indent = "  " * depth
    if isinstance(value, dict):
        lines = []
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{indent}{key}:")
                lines.extend(_text_lines(item, depth + 1))
            else:
                lines.append(f"{indent}{key}: {item}")
        return lines
    return [f"{indent}- {item}" for item in value]


def golden_file(directory: Path, script: Path) -> Path:
    return directory / f"{script.stem}.json"


def golden_diff(report: Report, directory: Path) -> List[str]:
    """Unified diff between the stored golden report and ``report``; empty on a match."""
    if report.path is None:
        return []
    stored = golden_file(directory, report.path)
    expected = stored.read_text() if stored.exists() else ""
    return list(
        difflib.unified_diff(
            expected.splitlines(keepends=True),
            report.to_json().splitlines(keepends=True),
            fromfile=str(stored),
            tofile=str(report.path),
        )
    )


def write_golden(report: Report, directory: Path) -> Path:
    if report.path is None:
        raise ValueError("Report has no script path")
    directory.mkdir(parents=True, exist_ok=True)
    target = golden_file(directory, report.path)
    target.write_text(report.to_json())
    return target
