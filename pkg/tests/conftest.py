import sys

from congest_dso.simulator import BANDWIDTH_AUDIT

# lines recorded by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"bandwidth audit: {BANDWIDTH_AUDIT['link_rounds']} link-rounds delivered, "
        f"{BANDWIDTH_AUDIT['violations']} over capacity"
    )


def pytest_sessionfinish(session, exitstatus):
    if BANDWIDTH_AUDIT["violations"]:
        print(f"bandwidth safety fired {BANDWIDTH_AUDIT['violations']} time(s)", file=sys.stderr)
        session.exitstatus = 1
