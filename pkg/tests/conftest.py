import time

import pytest

from varode.eigenproblem import build_table

# (criterion number, passed, detail) in the order recorded
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def tables():
    """Each eigenvalue table built once per session, with its build time in seconds."""
    cache = {}

    def get(table_id):
        if table_id not in cache:
            start = time.perf_counter()
            rows = build_table(table_id)
            cache[table_id] = (rows, time.perf_counter() - start)
        return cache[table_id]

    return get


@pytest.fixture
def criterion():
    """Record and print one pass/fail line, then fail the test if the criterion failed."""

    def record(number: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
