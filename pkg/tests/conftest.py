import numpy as np
import pytest

from probcast.graph import Graph, erdos_renyi, path_graph
from probcast.mixing import base_mixing_matrix


@pytest.fixture
def path3():
    return path_graph(3)


@pytest.fixture
def W_path3(path3):
    return base_mixing_matrix(path3, 1 / 3)


@pytest.fixture
def single_edge():
    return Graph(2, ((0, 1),))


@pytest.fixture(scope="session")
def reference_graph():
    return erdos_renyi(100, 0.1, 7)


def random_connected(n, rng, edge_prob=0.4):
    return erdos_renyi(n, edge_prob, int(rng.integers(2**31)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
