import pytest

from hsbcmsa.ions import builtin_ion_set, builtin_reference
from hsbcmsa.solvents import BUILTIN_SOLVENTS

ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): end-to-end acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    ok = report.passed and not report.skipped
    prev = ACCEPTANCE.get(number)
    ACCEPTANCE[number] = (title, ok if prev is None else prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def ions():
    return builtin_ion_set()


@pytest.fixture(scope="session")
def reference():
    return builtin_reference()


@pytest.fixture(scope="session")
def solvents():
    return BUILTIN_SOLVENTS
