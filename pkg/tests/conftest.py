import pytest

CRITERIA = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Per-criterion list of (part, passed, detail), reported at the end of the run."""
    return request.config.stash.setdefault(CRITERIA, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(CRITERIA, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(log):
        parts = log[crit]
        ok = all(p for _, p, _ in parts)
        failed = [f"{name}: {detail}" for name, p, detail in parts if not p]
        n = len(parts)
        tail = f" ({n} check{'s' if n != 1 else ''})" if ok else " - " + "; ".join(failed)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}{tail}")
