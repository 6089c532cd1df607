"""Collects per-criterion outcomes from test_acceptance.py and prints a summary."""

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_logreport(report):
    crit = _criteria.get(report.nodeid)
    if crit is None:
        return
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _outcomes.get(crit, True)
    if report.when == "call" or failed:
        _outcomes[crit] = prev and not failed


_criteria = {}
_titles = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, title = m.args
            _criteria[item.nodeid] = n
            _titles[n] = title


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_titles):
        if n not in _outcomes:
            state = "NOT RUN"
        else:
            state = "PASS" if _outcomes[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {state}  {_titles[n]}")
