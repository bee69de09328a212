import pytest

_OUTCOMES: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, label = marker.args
    passed = report.passed and _OUTCOMES.get(number, (label, True))[1]
    _OUTCOMES[number] = (label, passed)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        label, passed = _OUTCOMES[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {label}")
