"""Shared pytest wiring: collect release-gate verdicts.

The acceptance tests record one [PASS]/[FAIL] line apiece; printing
them from inside a test would be discarded for passing tests under
output capture, so they are replayed after the run instead.
"""

verdict_lines = []


def pytest_terminal_summary(terminalreporter):
    if verdict_lines:
        terminalreporter.section("release checklist")
        for line in verdict_lines:
            terminalreporter.write_line(line)
