import pytest

from seymour.graph import Digraph

ACCEPTANCE_LINES = []


@pytest.fixture
def cycle3():
    return Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def transitive3():
    return Digraph.from_arcs(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def path4():
    return Digraph.from_arcs(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def single_arc():
    return Digraph.from_arcs(2, [(0, 1)])


@pytest.fixture
def acceptance_report():
    def record(name, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
