import os

import pytest

from graphcensus.census import RunConfig, run_census
from graphcensus.enumerate import enumerate_gluings, enumerate_markings, enumerate_oriented_quad_graphs
from graphcensus.hypsolve import FIXTURE_DIR


def closed_triangulations(n):
    out = []
    for g in enumerate_oriented_quad_graphs(n):
        out.extend(enumerate_gluings(g))
    return out


@pytest.fixture(scope="session")
def closed_upto3():
    return {n: closed_triangulations(n) for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def efficient_upto2(closed_upto3):
    out = []
    for n in (1, 2):
        for tri in closed_upto3[n]:
            out.extend(enumerate_markings(tri))
    return out


@pytest.fixture(scope="session")
def census2():
    return run_census(RunConfig(max_complexity=2))


@pytest.fixture(scope="session")
def census3():
    return run_census(RunConfig(max_complexity=3, jobs=min(4, os.cpu_count() or 1)))


@pytest.fixture
def ideal_path():
    return lambda name: os.path.join(FIXTURE_DIR, name)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
