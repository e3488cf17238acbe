import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line and assert on it."""

    def _report(label, ok, detail):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
