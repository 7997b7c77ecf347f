import pytest


def pytest_configure(config):
    config._acceptance_rows = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(criterion: str, ok: bool, detail: str) -> bool:
        request.config._acceptance_rows.append((criterion, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = getattr(config, "_acceptance_rows", [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in rows:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
