import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(results):
        checks = results[crit]
        status = "PASS" if all(ok for ok, _ in checks) else "FAIL"
        tr.write_line(f"[{status}] criterion {crit}")
        for ok, detail in checks:
            tr.write_line(f"    {'ok  ' if ok else 'FAIL'} {detail}")
