def pytest_terminal_summary(terminalreporter):
    import sys
    acc = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acc.RESULTS:
        terminalreporter.write_line(line)
