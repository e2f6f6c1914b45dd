import pytest

from polytope_ml.polytope import LatticePolytope

# running-example pentagon in its listed order
PENTAGON = [(0, 1), (-1, 0), (-1, -1), (0, -1), (1, 0)]


@pytest.fixture
def pentagon():
    return LatticePolytope(PENTAGON)


@pytest.fixture
def triangle():
    return LatticePolytope([(1, 0), (0, 1), (-1, -1)])


@pytest.fixture
def cube_dual():
    return LatticePolytope([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
