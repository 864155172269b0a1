import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion id -> (title, all outcomes so far passed)
_CRITERIA: dict[str, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when == "teardown" and report.passed:
        return
    cid, title = marker.args
    entry = _CRITERIA.setdefault(cid, [title, True])
    if report.failed or (report.when == "call" and not report.passed):
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c[1:])):
        title, ok = _CRITERIA[cid]
        terminalreporter.write_line(f"{cid:<4} {'PASS' if ok else 'FAIL'}  {title}")
