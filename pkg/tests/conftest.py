import pytest

from vnsolver.graph import from_adjacency_matrix, from_edge_list

A_A = [
    [0, 1, 0, 0, 1],
    [1, 0, 1, 1, 0],
    [0, 1, 0, 1, 0],
    [0, 1, 1, 0, 1],
    [1, 0, 0, 1, 0],
]
A_B = [
    [0, 1, 1, 1, 1],
    [1, 0, 0, 0, 1],
    [1, 0, 0, 1, 0],
    [1, 0, 1, 0, 0],
    [1, 1, 0, 0, 0],
]

# fixture graphs for golden images: intro-figure pair, Petersen, K4, a sparse 15-node graph
GOLDEN_GRAPHS = {
    "fig1a": "Djc",
    "fig1b": "Dto",
    "petersen": "IheA@GUAo",
    "k4": "C~",
    "gnp15": "NB_D^ItXn?gdQ?x?GQ?",
}


@pytest.fixture
def graph_a():
    return from_adjacency_matrix(A_A)


@pytest.fixture
def graph_b():
    return from_adjacency_matrix(A_B)


@pytest.fixture
def k3():
    return from_edge_list(3, [(0, 1), (1, 2), (0, 2)])


# one line per acceptance criterion, collected by tests/test_acceptance.py
CRITERIA = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(CRITERIA, key=lambda c: c[0]):
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
