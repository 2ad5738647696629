import pytest

from mbet_formation.config import example_scenario

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture(scope="session")
def example():
    return example_scenario()


@pytest.fixture(scope="session")
def acceptance_report():
    """Record one line per acceptance criterion; printed in the terminal summary."""

    def record(key: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES[key] = f"{key} {'PASS' if ok else 'FAIL'}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
