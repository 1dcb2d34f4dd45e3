import numpy as np
import pytest

from slfe import fixtures
from slfe.graph import build_dual_csr


@pytest.fixture
def sample():
    return fixtures.sample()


@pytest.fixture(params=sorted(fixtures.FIXTURES))
def fixture_graph(request):
    return request.param, fixtures.FIXTURES[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def small_graph(edges, n=None, weighted=None):
    return build_dual_csr(edges, n, weighted=weighted)
