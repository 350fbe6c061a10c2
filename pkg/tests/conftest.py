"""Shared test plumbing: a report channel for the acceptance suite.

Acceptance tests record one line per criterion; the lines are printed in
the terminal summary so they are visible even though pytest captures
stdout of passing tests.
"""

ACCEPTANCE_LINES = []


def record(number: int, name: str, ok: bool, detail: str = "",
           gating: bool = True) -> None:
    status = "PASS" if ok else ("FAIL" if gating else "INFO-FAIL")
    line = f"criterion {number:2d} [{status}] {name}"
    if detail:
        line += f" — {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
