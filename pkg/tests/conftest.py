"""Shared plumbing: collect acceptance-criterion outcomes and print them
as one line each at the end of the run."""

ACCEPTANCE: list[tuple[int, str, bool]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num, title, ok in sorted(ACCEPTANCE):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[criterion {num:02d}] {verdict} - {title}")
