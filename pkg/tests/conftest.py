def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(RESULTS):
        checks = RESULTS[crit]
        bad = [c for c in checks if not c[1]]
        tr.write_line(f"criterion {crit}: {'FAIL' if bad else 'PASS'} ({len(checks) - len(bad)}/{len(checks)} checks)")
        for name, _, detail in bad:
            tr.write_line(f"    failed: {name}: {detail}")
