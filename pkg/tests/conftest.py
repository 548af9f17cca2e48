import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import trial_division_primes  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--full-table1", action="store_true", default=False,
                     help="run the sieve to N = 4020634603 and check every published row")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full-table1"):
        return
    skip = pytest.mark.skip(reason="needs --full-table1")
    for item in items:
        if "full" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def primes_1e5():
    return trial_division_primes(10**5)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(n, ok, detail)."""
    def record(n, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
