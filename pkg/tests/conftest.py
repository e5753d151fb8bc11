from __future__ import annotations

import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(label: str, ok: bool, detail: str) -> bool:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        print(lines[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash[_ACCEPTANCE]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
