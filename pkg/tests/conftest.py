"""Per-criterion reporting for the acceptance suite."""

import pytest

_results = {}
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n = m.args[0]
            _titles[n] = m.args[1] if len(m.args) > 1 else ""
            _results.setdefault(n, [])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results[m.args[0]].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        runs = _results[n]
        status = "PASS" if runs and all(runs) else ("FAIL" if runs else "NOT RUN")
        terminalreporter.write_line(f"criterion {n}: {status}  {_titles[n]}")
