import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
FIXTURES = HERE / "fixtures"

# oracles.py and fixtures/make_fixtures.py are imported as plain modules.
sys.path.insert(0, str(HERE))
sys.path.insert(0, str(FIXTURES))


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the line is printed in the terminal summary."""

    def record(label: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
