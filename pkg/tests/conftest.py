import numpy as np
import pytest

# (number, title, passed, detail) recorded by the acceptance module
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def criterion():
    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE.append((number, title, bool(passed), detail))
        print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
        assert passed, f"criterion {number} ({title}) failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        tr.write_line(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")


@pytest.fixture(autouse=True)
def _quiet_numpy():
    with np.errstate(over="ignore", under="ignore"):
        yield
