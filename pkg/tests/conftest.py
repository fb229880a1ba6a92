import math
import time

import pytest

from closedgeo.enumerator import ClassTable, build_table
from closedgeo.periods import HarmonicForm
from closedgeo.surface import bolza

# pass/fail lines of the acceptance suite, printed at the end of the run
ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {k}: {detail}")


@pytest.fixture(scope="session")
def group():
    return bolza()


@pytest.fixture(scope="session")
def form():
    return HarmonicForm((1.0, 0.3, -0.7, 0.2))


BUILD_SECONDS = {}


@pytest.fixture(scope="session")
def table12():
    t0 = time.perf_counter()
    t = build_table(12.0)
    BUILD_SECONDS[12.0] = time.perf_counter() - t0
    return t


@pytest.fixture(scope="session")
def table10(table12):
    return truncate(table12, 10.0)


@pytest.fixture(scope="session")
def table8():
    return build_table(8.0)


def truncate(t, x):
    return ClassTable([c for c in t.classes if c.l <= x], x, t.group_name, t.slack,
                      t.genus, t.vol, t.systole)


E = math.e
