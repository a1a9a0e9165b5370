import _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # verdict lines collected by test_acceptance, shown after capture ends
    if _report.lines:
        terminalreporter.section("acceptance criteria")
        for line in _report.lines:
            terminalreporter.write_line(line)
