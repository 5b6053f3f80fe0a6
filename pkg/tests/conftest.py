import pytest

from croptree import label_dataset
from support import make_stations


@pytest.fixture(scope="session")
def stations75():
    return make_stations(n=75, seed=7)


@pytest.fixture(scope="session")
def dataset75(stations75):
    return label_dataset(stations75)
