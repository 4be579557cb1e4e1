import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): exit criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            item.user_properties.append(("acceptance", mark.args))


def pytest_runtest_logreport(report):
    for key, value in report.user_properties:
        if key != "acceptance":
            continue
        number, text = value
        outcome = "SKIP" if report.skipped else ("FAIL" if report.failed else "PASS")
        if report.when == "call" or report.outcome != "passed":
            previous = _acceptance.get(report.nodeid, (number, text, "PASS"))[2]
            if previous != "FAIL":
                _acceptance[report.nodeid] = (number, text, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    by_number = {}
    for number, text, outcome in _acceptance.values():
        entry = by_number.setdefault(number, [text, []])
        entry[1].append(outcome)
    for number in sorted(by_number):
        text, outcomes = by_number[number]
        if "FAIL" in outcomes:
            verdict = "FAIL"
        elif all(o == "SKIP" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {number}: {verdict:4}  {text}")
