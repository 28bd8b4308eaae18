import support


def pytest_terminal_summary(terminalreporter):
    results = support.ACCEPTANCE
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        title, ok, elapsed, limit, detail = results[n]
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {n:>2}: {title} ({elapsed:.2f}s, limit {limit}s)"
        if detail:
            line += f" {detail}"
        terminalreporter.write_line(line)
