import time

import pytest

# criterion number -> [title, passed so far, seconds, tests seen]
_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or rep.outcome != "passed":
        number, title = marker.args
        row = _CRITERIA.setdefault(number, [title, True, 0.0, 0])
        row[1] = row[1] and rep.outcome == "passed"
        row[2] += rep.duration
        if rep.when == "call":
            row[3] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, secs, n = _CRITERIA[number]
        tr.write_line(f"criterion {number:>2}  {'PASS' if ok else 'FAIL'}  {title}  ({n} tests, {secs:.1f} s)")


@pytest.fixture
def stopwatch():
    """Returns a callable giving seconds since the test started."""
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0
