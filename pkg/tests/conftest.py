def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        r = RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if r.passed else 'FAIL'}  {n:>2}  {r.name:<34} {r.detail}")
