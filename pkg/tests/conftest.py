import pytest

from tworev import ProductInstance, uniform_on


@pytest.fixture
def u12():
    return uniform_on([1, 2])


@pytest.fixture
def iid_u12(u12):
    return ProductInstance(u12, u12)
