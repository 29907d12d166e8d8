import pytest

_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_report():
    """Call with (number, title, passed, detail); lines are printed after the run."""

    def report(number, title, passed, detail=""):
        tag = "PASS" if passed else "FAIL"
        _LINES.append(f"[{tag}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
