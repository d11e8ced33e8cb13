import pytest

# lines appended by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
