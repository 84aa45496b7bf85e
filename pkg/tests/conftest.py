from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from superloops.config import Config
from superloops.forms import FormContext
from superloops.superalg import Context, VarSpec
from superloops.trigger import Trigger


@pytest.fixture
def trigger():
    return Trigger()


@pytest.fixture(autouse=True)
def mock_time_sleep(mocker: MockerFixture):
    return mocker.patch("superloops.cli.time.sleep", autospec=True)


@pytest.fixture
def mock_observer(mocker: MockerFixture):
    return mocker.patch("superloops.cli.Observer", autospec=True)


@pytest.fixture
def mock_main_loop(mocker: MockerFixture):
    mock = mocker.patch("superloops.cli.main_loop", autospec=True)
    mock.side_effect = InterruptedError
    return mock


@pytest.fixture
def mock_execute(mocker: MockerFixture):
    mock = mocker.patch("superloops.cli.execute", autospec=True)
    mock.return_value = True
    return mock


@pytest.fixture(scope="session")
def tmp_path() -> Path:
    return Path("tests/tmp")


@pytest.fixture(scope="session", autouse=True)
def create_tmp_dir(tmp_path: Path):
    tmp_path.mkdir(exist_ok=True)


@pytest.fixture
def pyproject_toml_path(tmp_path: Path):
    path = tmp_path.joinpath("pyproject.toml")
    path.touch()

    yield path

    path.unlink()


@pytest.fixture
def config():
    return Config(path=Path())


@pytest.fixture
def plane() -> Context:
    return Context([VarSpec("x1"), VarSpec("x2")])


@pytest.fixture
def super_plane() -> Context:
    return Context([VarSpec("x1"), VarSpec("x2"), VarSpec("xi", parity=1)])


@pytest.fixture
def plane_forms(plane: Context) -> FormContext:
    return FormContext(plane)


@pytest.fixture
def write_script(tmp_path: Path):
    written = []

    def write(name: str, text: str) -> Path:
        path = tmp_path.joinpath(name)
        path.write_text(text)
        written.append(path)
        return path

    yield write

    for path in written:
        path.unlink()
