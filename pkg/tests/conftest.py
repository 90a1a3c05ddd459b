import os
import re

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one pass/fail line per acceptance criterion; printed at session end."""

    def record(label: str, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_order):
            terminalreporter.write_line(line)


def _criterion_order(line: str):
    label = line.split("criterion ", 1)[1].split(":", 1)[0]
    lead = re.match(r"\d+", label)
    return (int(lead.group()) if lead else 0, label)
