ACCEPTANCE_RESULTS = {}


def record(criterion: int, title: str, ok: bool, detail: str = ""):
    ACCEPTANCE_RESULTS[criterion] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[n]
        line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
