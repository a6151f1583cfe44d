import pytest

_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``criterion("3", ok, "detail")``; the line is printed immediately
    and repeated in the terminal summary.
    """

    def record(label, ok, detail=""):
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
