"""Shared pytest wiring.

The acceptance suite registers one PASS/FAIL line per criterion; the
terminal-summary hook below prints them after the run so they are
visible regardless of output capture.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
