import pytest

from hybridber import load_preset


@pytest.fixture(scope="session")
def default_scenario():
    return load_preset("default")


@pytest.fixture(scope="session")
def default_link(default_scenario):
    return default_scenario.molecular


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
