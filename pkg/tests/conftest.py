import re


def pytest_terminal_summary(terminalreporter):
    """One verdict line per acceptance criterion."""
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when != "call" and status != "error":
                continue
            if "test_acceptance.py::" not in rep.nodeid:
                continue
            name = rep.nodeid.split("::", 1)[1]
            m = re.match(r"test_ac(\d+)_", name)
            label = f"AC{int(m.group(1))}" if m else name
            rows.append((int(m.group(1)) if m else 99, label, "PASS" if status == "passed" else "FAIL", name))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for _, label, verdict, name in sorted(rows):
        terminalreporter.write_line(f"{label:<5} {verdict}  {name}")
