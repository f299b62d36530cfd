import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
