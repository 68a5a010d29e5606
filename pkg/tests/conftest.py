from __future__ import annotations

import sys
from pathlib import Path

import pytest

from semtraj import Trajectory, demo_forest, encode_trajectory

sys.path.insert(0, str(Path(__file__).parent))

CAROL = ("Maris Apartment", "Sydney Airport", "O'Hare Airport", "Tokyo Airport", "Facebook Japan", "KFC",
         "Facebook Japan", "Maris Apartment")
DAVE = ("Windy Apartment", "O'Hare Airport", "Paris-Charles De Gaulle", "Microsoft France", "Restaurant Goude",
        "Paris Convention Center", "Paris-Charles De Gaulle", "O'Hare Airport", "Windy Apartment")


@pytest.fixture(scope="session")
def forest():
    return demo_forest()


@pytest.fixture(scope="session")
def carol(forest):
    return encode_trajectory(Trajectory(1, CAROL), forest)


@pytest.fixture(scope="session")
def dave(forest):
    return encode_trajectory(Trajectory(2, DAVE), forest)


# acceptance reporting: tests marked ``criterion(n, title)`` get one PASS/FAIL line each

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    _criteria[number] = ("PASS" if report.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, detail = _criteria[number]
        line = f"{status} criterion {number:>2}: {title}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))
