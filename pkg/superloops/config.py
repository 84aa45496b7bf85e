from argparse import Namespace
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Mapping, Optional

from .constants import (
    DEFAULT_DELAY,
    DEFAULT_INTERNAL_CAP,
    DEFAULT_MAX_BASIS_SIZE,
    DEFAULT_NIL_ORDER,
    DEFAULT_SEED,
    DEFAULT_TWIN_CAP,
)

try:
    import tomllib
except ImportError:
    import tomli as tomllib


CONFIG_SECTION_NAME = "superloops"
CLI_FIELDS = {
    "json",
    "seed",
    "caps",
    "timing",
    "golden",
    "update_golden",
    "watch",
    "verbose",
    "delay",
    "patterns",
    "ignore_patterns",
}
CONFIG_FIELDS = (CLI_FIELDS - {"update_golden", "watch", "verbose"}) | {
    "nil_order",
    "twin_cap",
    "max_basis_size",
}


@dataclass
class Config:
    path: Path
    json: bool = False
    seed: int = DEFAULT_SEED
    caps: int = DEFAULT_INTERNAL_CAP
    nil_order: int = DEFAULT_NIL_ORDER
    twin_cap: int = DEFAULT_TWIN_CAP
    max_basis_size: int = DEFAULT_MAX_BASIS_SIZE
    timing: bool = False
    golden: Optional[Path] = None
    update_golden: bool = False
    watch: bool = False
    verbose: bool = False
    delay: float = DEFAULT_DELAY
    patterns: List[str] = field(default_factory=list)
    ignore_patterns: List[str] = field(default_factory=list)

    @classmethod
    def create(cls, namespace: Namespace) -> "Config":
        instance = cls(path=namespace.path)

        start = namespace.path if namespace.path.is_dir() else namespace.path.parent
        config_path = find_config(start.absolute())
        if config_path:
            parsed = parse_config(config_path)
            instance._update_from_mapping(parsed)

        instance._update_from_namespace(namespace)
        return instance

    def _update_from_mapping(self, data: Mapping[str, Any]) -> None:
        for key, val in data.items():
            if key == "golden":
                val = Path(val)
            setattr(self, key, val)

    def _update_from_namespace(self, namespace: Namespace) -> None:
        self.path = namespace.path

        for f in CLI_FIELDS:
            val = getattr(namespace, f, None)
            if val is not None and val is not False:
                setattr(self, f, val)


def find_config(cwd: Path) -> Optional[Path]:
    filename = "pyproject.toml"

    for path in (cwd, *cwd.parents):
        config_path = path.joinpath(filename)

        if config_path.exists():
            return config_path

    return None


def parse_config(path: Path) -> Mapping[str, Any]:
    with open(path, "rb") as f:
        try:
            data = tomllib.load(f)
        except Exception as exc:
            raise SystemExit(f"Error parsing pyproject.toml\n{exc}")

    try:
        data = data["tool"][CONFIG_SECTION_NAME]
    except KeyError:
        return {}

    for key in data.keys():
        if key not in CONFIG_FIELDS:
            raise SystemExit(
                f"Error parsing pyproject.toml.\nUnrecognized option: {key}"
            )
    return data
