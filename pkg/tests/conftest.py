import pytest

from gsp_sampling import kernels
from gsp_sampling.graph import Graph, complete_graph, generate_er, path_graph, shift_operator
from gsp_sampling.spectral import band, eigendecompose

ACCEPTANCE_LINES = []


def basis_of(graph, kind="combinatorial"):
    return eigendecompose(shift_operator(graph, kind), kind)


@pytest.fixture
def p3_basis():
    return basis_of(path_graph(3))


@pytest.fixture
def k3_basis():
    return basis_of(complete_graph(3))


@pytest.fixture(scope="session")
def er30():
    """Five connected ER(30, 0.8) graphs with bandwidth 5."""
    return [band(basis_of(generate_er(30, 0.8, seed)), 5) for seed in range(5)]


@pytest.fixture
def twin_graph():
    # Vertices 2 and 3 share neighbours {0, 1}; their U_2 rows coincide.
    return Graph(5, ((0, 1, 1), (0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1), (0, 4, 1)))


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return request.param


def random_subset(rng, n, size):
    return [int(v) for v in rng.permutation(n)[:size]]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
