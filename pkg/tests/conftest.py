import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_criteria = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1][len("test_criterion_"):]
        _criteria.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria:
        terminalreporter.write_line(f"criterion {name}: {'PASS' if outcome == 'passed' else 'FAIL'}")
