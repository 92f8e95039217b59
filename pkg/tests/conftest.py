import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_outcomes: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(int(match.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        ok = all(o == "passed" for o in _outcomes[number])
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}")
