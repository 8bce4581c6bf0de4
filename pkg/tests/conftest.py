"""Shared fixtures and the acceptance scoreboard."""
from __future__ import annotations

import pytest

from intriguing.catalog import build_named
from intriguing.geometry import (cap_search, collinearity_graph, elliptic_gq, find_hemisystem,
                                 linear_representation, minus_perp, restrict_to_set)

_SCOREBOARD: dict[int, tuple[str, str, float]] = {}


# ---------------------------------------------------------------------------
# acceptance recorder
# ---------------------------------------------------------------------------

@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    prev = _SCOREBOARD.get(number)
    if rep.failed:
        _SCOREBOARD[number] = (title, "FAIL", rep.duration)
    elif rep.when == "call" and (prev is None or prev[1] != "FAIL"):
        _SCOREBOARD[number] = (title, "PASS", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _SCOREBOARD:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_SCOREBOARD):
        title, verdict, dt = _SCOREBOARD[n]
        tr.write_line(f"AC{n:02d} {verdict} {title} ({dt:.2f} s)")
    passed = sum(1 for _, v, _ in _SCOREBOARD.values() if v == "PASS")
    tr.write_line(f"{passed}/{len(_SCOREBOARD)} acceptance criteria passed")


# ---------------------------------------------------------------------------
# session fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def named():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_named(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def petersen(named):
    return named("petersen")


@pytest.fixture(scope="session")
def clebsch(named):
    return named("clebsch")


@pytest.fixture(scope="session")
def q53():
    return elliptic_gq(3)


@pytest.fixture(scope="session")
def q53_graph(q53):
    return collinearity_graph(q53)


@pytest.fixture(scope="session")
def q52():
    return elliptic_gq(2)


@pytest.fixture(scope="session")
def hemisystem(q53):
    return find_hemisystem(q53)


@pytest.fixture(scope="session")
def hemi_pq(q53, hemisystem):
    return restrict_to_set(q53, hemisystem)


@pytest.fixture(scope="session")
def mp0(q53):
    """Q-(5,3) minus the perp of point 0."""
    return minus_perp(q53, 0)


@pytest.fixture(scope="session")
def mp0_graph(mp0):
    return collinearity_graph(mp0)


@pytest.fixture(scope="session")
def coxeter_rep():
    return linear_representation(cap_search(4, 3, 11, require_srg=True))
