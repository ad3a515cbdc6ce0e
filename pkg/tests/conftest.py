from __future__ import annotations

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    results = request.config.stash[_RESULTS]

    def record(number: int, ok: bool, detail: str, skipped: bool = False):
        word = "SKIP" if skipped else ("PASS" if ok else "FAIL")
        line = f"{word} criterion {number}: {detail}"
        results.append((number, line))
        print(line)
        if skipped:
            pytest.skip(detail)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_RESULTS]
    if results:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(results):
            terminalreporter.write_line(line)
