from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# (number, title) -> "PASS"/"FAIL", filled in by the report hook below
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    key = tuple(mark.args)
    if rep.failed or (rep.when == "call" and key not in _CRITERIA):
        _CRITERIA[key] = "FAIL" if rep.failed else "PASS"
    if rep.skipped:
        _CRITERIA[key] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), status in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"{status}  {num:>2}. {title}")


@pytest.fixture(scope="session")
def data_dir():
    return DATA
