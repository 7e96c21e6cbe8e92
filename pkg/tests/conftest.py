"""Collects the acceptance verdicts so they are listed at the end of the run."""
import time

import pytest

_VERDICTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    ok = outcome.excinfo is None
    line = (f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  "
            f"({time.perf_counter() - start:.1f}s)")
    _VERDICTS[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[number])
