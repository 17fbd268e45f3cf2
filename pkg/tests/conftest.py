import numpy as np
import pytest

from src.mesh.generators import generate_cartesian, generate_distorted
from src.models.mesh import Aabb


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run desk-scale acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def unit_box():
    return Aabb((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))


@pytest.fixture
def cube_4(unit_box):
    return generate_cartesian(unit_box, (4, 4, 4), name="cube-4")


@pytest.fixture
def cube_8(unit_box):
    return generate_cartesian(unit_box, (8, 8, 8), name="cube-8")


@pytest.fixture
def slab_pair():
    """Two distorted single-layer grids over the same slab; every face stays planar."""
    box = Aabb((-1.0, -1.0, 0.0), (1.0, 1.0, 0.5))
    acoustic = generate_distorted(generate_cartesian(box, (4, 4, 1)), 0.2, seed=11)
    fluid = generate_distorted(generate_cartesian(box, (7, 6, 1)), 0.2, seed=12)
    return acoustic, fluid
