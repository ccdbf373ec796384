import numpy as np
import pytest

from orliczgeo import make_grid, make_power_weight, mollify


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256)


@pytest.fixture(scope="session")
def grid1024():
    return make_grid(1024)


@pytest.fixture(scope="session")
def w1():
    return make_power_weight(1.0)


@pytest.fixture(scope="session")
def w2():
    return make_power_weight(2.0)


@pytest.fixture(scope="session")
def w15m():
    return mollify(make_power_weight(1.5), 8)


@pytest.fixture(scope="session")
def battery(w1, w2, w15m):
    return [("chi_1", w1), ("chi_2", w2), ("mollified_chi_1.5", w15m)]
