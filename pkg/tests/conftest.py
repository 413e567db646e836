from __future__ import annotations

import pytest

_LINES: dict = {}


@pytest.fixture
def acceptance_report():
    """``report(n, ok, detail)`` records one pass/fail line for criterion ``n``."""

    def report(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES[n] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
