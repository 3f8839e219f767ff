import pytest

from wmcf.space import make_space
from wmcf.warp import cosh_warp, power_warp


@pytest.fixture
def s3():
    return make_space("sphere", 3)


@pytest.fixture
def cp2():
    return make_space("cp", 4)


@pytest.fixture
def cosh1():
    return cosh_warp(1.0)


@pytest.fixture
def power_half():
    return power_warp(0.0, 0.5)
