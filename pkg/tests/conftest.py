import pytest

from trampsim.graph import Channel, build_network


@pytest.fixture
def chain():
    """a -> b -> c, unit fees."""
    return build_network("abc", [Channel("ab", "a", "b", 1), Channel("bc", "b", "c", 1)])


@pytest.fixture
def triangle():
    return build_network("abc", [Channel(0, "a", "b", 1), Channel(1, "b", "c", 1), Channel(2, "a", "c", 3)])


# --- acceptance report ---------------------------------------------------------------------------

import time
from contextlib import contextmanager

_ACCEPTANCE_KEY = pytest.StashKey[list]()


class _Entry:
    def __init__(self, number, name, limit):
        self.number, self.name, self.limit = number, name, limit
        self.detail = ""
        self.passed = False
        self.elapsed = 0.0


@pytest.fixture
def criterion(request):
    """Context manager that times one acceptance criterion and records PASS/FAIL for the summary."""
    rows = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    @contextmanager
    def run(number, name, limit=None):
        entry = _Entry(number, name, limit)
        rows.append(entry)
        start = time.perf_counter()
        try:
            yield entry
        finally:
            entry.elapsed = time.perf_counter() - start
        if limit is not None:
            assert entry.elapsed < limit, f"criterion {number} took {entry.elapsed:.2f}s (limit {limit}s)"
        entry.passed = True

    return run


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_ACCEPTANCE_KEY, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for e in sorted(rows, key=lambda e: e.number):
        limit = "" if e.limit is None else f" / {e.limit:g}s"
        status = "PASS" if e.passed else "FAIL"
        terminalreporter.write_line(f"{status}  [{e.number:>2}] {e.name} ({e.elapsed:.2f}s{limit}) {e.detail}")
