import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
    passed = sum("[PASS]" in line for line in mod.RESULTS.values())
    terminalreporter.write_line(f"{passed} of {len(mod.RESULTS)} criteria pass")
