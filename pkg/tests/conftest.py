import pytest
from hypothesis import settings

from helpers import BACKEND_NAMES
from mlnstore.backends import BACKENDS

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=BACKEND_NAMES)
def backend(request) -> str:
    return request.param


@pytest.fixture
def make(backend):
    """Factory for an empty store of the parametrized backend."""

    def _make(schema=None):
        return BACKENDS[backend](schema)

    return _make


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion and assert it."""

    def _report(criterion: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
