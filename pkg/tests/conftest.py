"""Shared test plumbing: collect acceptance verdicts for the run summary."""

import pytest

_VERDICTS = []


@pytest.fixture
def verdicts():
    """Registry the acceptance tests append their pass/fail lines to."""
    return _VERDICTS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
