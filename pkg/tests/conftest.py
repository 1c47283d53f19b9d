import numpy as np
import pytest

from qwalk import graph


@pytest.fixture(scope="session")
def search_suite():
    """Vertex-transitive graphs the deterministic-search criteria run on."""
    return [
        graph.johnson(5, 2),
        graph.hamming(2, 3),
        graph.rook(3, 3),
        graph.kneser(5, 2),
        graph.complete_square(3),
    ]


@pytest.fixture(scope="session")
def sampling_suite(search_suite):
    return list(search_suite) + [graph.johnson(7, 2), graph.hamming(3, 2)]


@pytest.fixture
def c4():
    return graph.rook(2, 2)


def laplacian_eigenvalues(g):
    """Independent spectrum: numpy eigvalsh on the explicit Laplacian."""
    return np.linalg.eigvalsh(graph.laplacian(g))
