from argparse import Namespace
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from superloops.config import (
    CLI_FIELDS,
    CONFIG_SECTION_NAME,
    Config,
    find_config,
    parse_config,
)
from superloops.constants import (
    DEFAULT_DELAY,
    DEFAULT_INTERNAL_CAP,
    DEFAULT_NIL_ORDER,
    DEFAULT_SEED,
)


@pytest.fixture(autouse=True)
def _patch_cwd(mocker: MockerFixture, tmp_path: Path):
    mock = mocker.patch("superloops.config.Path.cwd")
    mock.return_value = tmp_path


def _namespace(path: Path, **values) -> Namespace:
    fields = {f: None for f in CLI_FIELDS}
    fields.update(json=False, timing=False, update_golden=False, watch=False, verbose=False)
    fields.update(values)
    return Namespace(path=path, **fields)


@pytest.fixture
def empty_namespace(tmp_path: Path):
    return _namespace(tmp_path)


@pytest.fixture
def config(empty_namespace: Namespace) -> Config:
    return Config.create(empty_namespace)


@pytest.fixture
def pyproject_toml(pyproject_toml_path: Path) -> Path:
    pyproject_toml_path.write_text(
        f"[tool.{CONFIG_SECTION_NAME}]\n"
        "json = true\n"
        "seed = 7\n"
        "caps = 2\n"
        "nil_order = 4\n"
        "delay = 999\n"
        "golden = 'golden'\n"
        "patterns = ['*.sl', '*.toml']\n"
        "ignore_patterns = ['draft.sl']\n"
    )

    return pyproject_toml_path


@pytest.fixture
def namespace(tmp_path: Path) -> Namespace:
    return _namespace(
        tmp_path,
        json=True,
        seed=11,
        caps=3,
        timing=True,
        golden=Path("expected"),
        update_golden=True,
        watch=True,
        verbose=True,
        delay=20,
        patterns=["*.sl", "*.txt"],
        ignore_patterns=["main.sl"],
    )


def test_default_values(config: Config):
    assert config.json is False
    assert config.seed == DEFAULT_SEED
    assert config.caps == DEFAULT_INTERNAL_CAP
    assert config.nil_order == DEFAULT_NIL_ORDER
    assert config.delay == DEFAULT_DELAY
    assert config.golden is None
    assert config.patterns == []
    assert config.ignore_patterns == []


def test_cli_args(namespace: Namespace):
    config = Config.create(namespace=namespace)

    for f in CLI_FIELDS:
        assert getattr(config, f) == getattr(namespace, f)


def test_cli_zero_seed_is_kept(tmp_path: Path):
    config = Config.create(_namespace(tmp_path, seed=0))

    assert config.seed == 0


def test_cli_args_none_values_are_skipped(empty_namespace: Namespace):
    config = Config.create(namespace=empty_namespace)

    for f in CLI_FIELDS - {"golden"}:
        assert getattr(config, f) is not None


def test_pyproject_toml(pyproject_toml: Path, config: Config):
    assert config.json is True
    assert config.seed == 7
    assert config.caps == 2
    assert config.nil_order == 4
    assert config.delay == 999
    assert config.golden == Path("golden")
    assert config.patterns == ["*.sl", "*.toml"]
    assert config.ignore_patterns == ["draft.sl"]


def test_cli_args_preferred_over_pyproject_toml(
    pyproject_toml: Path, namespace: Namespace
):
    config = Config.create(namespace)

    for f in CLI_FIELDS:
        assert getattr(config, f) == getattr(namespace, f)
    assert config.nil_order == 4


def test_config_found_from_script_path(pyproject_toml: Path, tmp_path: Path):
    config = Config.create(_namespace(tmp_path.joinpath("missing.sl")))

    assert config.seed == 7


@pytest.mark.parametrize(
    ("work_dir"),
    [
        Path(""),
        Path("test/"),
        Path("test/nested/dir/"),
    ],
)
def test_find_config(
    tmp_path: Path, pyproject_toml_path: Path, work_dir: Path, mocker: MockerFixture
):
    work_dir = tmp_path.joinpath(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)

    got = find_config(work_dir)
    assert got == pyproject_toml_path, "Config file not found"


def test_parse_config_no_section(pyproject_toml_path: Path):
    pyproject_toml_path.write_text("[tool.another_section]\ndelay = 2\nseed = 3\n")

    got = parse_config(pyproject_toml_path)

    assert got == {}


def test_parse_config_parse_error(pyproject_toml_path: Path):
    pyproject_toml_path.write_text(f"[tool.{CONFIG_SECTION_NAME}]\ndelay = 2\nseed = x\n")

    with pytest.raises(SystemExit, match="Error parsing pyproject.toml"):
        parse_config(pyproject_toml_path)


@pytest.mark.parametrize("key", ["foo", "watch", "update_golden"])
def test_parse_config_unrecognized_option(pyproject_toml_path: Path, key: str):
    pyproject_toml_path.write_text(f"[tool.{CONFIG_SECTION_NAME}]\n{key} = true\n")

    with pytest.raises(SystemExit, match=f"Unrecognized option: {key}"):
        parse_config(pyproject_toml_path)
