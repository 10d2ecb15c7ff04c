"""Collects acceptance results and prints one line per criterion."""
from collections import OrderedDict

_criteria = OrderedDict()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = _marks.get(report.nodeid)
    if mark is None:
        return
    number, part = mark
    _criteria.setdefault(number, []).append((part, report.outcome))


_marks = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _marks[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, parts in sorted(_criteria.items()):
        ok = all(outcome == "passed" for _, outcome in parts)
        tally = OrderedDict()
        for part, outcome in parts:
            passed, total = tally.get(part, (0, 0))
            tally[part] = (passed + (outcome == "passed"), total + 1)
        detail = "; ".join(f"{part} {p}/{t}" for part, (p, t) in tally.items())
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
