import random

import pytest

from helpers import ALL_SIGS

_CRITERIA = {}


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=ALL_SIGS, ids=["m1n1", "m1n2", "m2n1", "m2n2"])
def sig(request):
    return request.param


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _CRITERIA[number] = (title, rep.passed, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, seconds = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {number}: {title} ({seconds:.1f} s)")
