import pytest

from hoplogic import parse_program

SECTION2_SOURCE = "A <- B, C.\nD <- B.\nC.\n"


@pytest.fixture
def section2():
    """The three-clause example program: A <- B, C.  D <- B.  C."""
    return parse_program(SECTION2_SOURCE)


@pytest.fixture
def fact_c():
    return parse_program("C.")


ACCEPTANCE_LINES: dict[str, str] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
