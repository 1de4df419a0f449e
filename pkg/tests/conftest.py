import re

import pytest

from halasz.primes import build_tables

_CRITERIA: dict[int, list[tuple[str, str]]] = {}


@pytest.fixture(scope="session")
def tables():
    """Sieve up to 10^6, shared by every test."""
    return build_tables(10**6)


@pytest.fixture(scope="session")
def small_tables():
    return build_tables(10**4)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(int(m.group(1)), []).append((m.group(2), report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _CRITERIA[n]
        ok = all(outcome == "passed" for _, outcome in results)
        parts = ", ".join(f"{name}={outcome}" for name, outcome in results)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {parts}")
