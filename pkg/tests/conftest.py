import numpy as np
import pytest

from eigendesign.fem import Space, build_disk_mesh, build_dofmap, build_square_mesh
from eigendesign.schemas import ProblemSpec


@pytest.fixture(scope="session")
def square_mesh():
    return build_square_mesh(6)


@pytest.fixture(scope="session")
def disk_mesh():
    return build_disk_mesh(24)


@pytest.fixture(scope="session")
def square_p2(square_mesh):
    return build_dofmap(square_mesh, Space.P2)


@pytest.fixture(scope="session")
def disk_p2(disk_mesh):
    return build_dofmap(disk_mesh, Space.P2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def spec():
    return ProblemSpec()
