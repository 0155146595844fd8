ACCEPTANCE_RESULTS = []


def record_criterion(number: int, description: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((number, description, ok, detail))
    assert ok, f"criterion {number} ({description}): {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, description, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[criterion {number}] {status} {description}: {detail}")
