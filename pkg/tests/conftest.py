import numpy as np
import pytest

from qgoa.problems import GraphInstance, QuboInstance, mvc_qubo


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def path_graph() -> GraphInstance:
    """Path 0 - 1 - 2"""
    return GraphInstance.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def path_mvc(path_graph) -> QuboInstance:
    return mvc_qubo(path_graph, b=1.0)


@pytest.fixture
def edge_mvc() -> QuboInstance:
    return mvc_qubo(GraphInstance.from_edges(2, [(0, 1)]), b=1.0)
