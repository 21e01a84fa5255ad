import re
from collections import defaultdict

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, list[tuple[str, bool]]] = defaultdict(list)


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _outcomes[int(match.group(1))].append((name, report.outcome == "passed"))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        results = _outcomes[number]
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  (failing: " + ", ".join(failed) + ")"
        terminalreporter.write_line(line)
