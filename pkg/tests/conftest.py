import pytest

# (criterion, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE_RESULTS: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record_criterion():
    def record(num: int, ok: bool, detail: str):
        ACCEPTANCE_RESULTS.append((num, bool(ok), detail))
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record
