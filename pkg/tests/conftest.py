import pytest

from hecke.heckealg import make_bqf
from hecke.numberfield import make_context


@pytest.fixture
def ctx3():
    return make_context(3)


@pytest.fixture
def ctx4():
    return make_context(4)


@pytest.fixture
def ctx5():
    return make_context(5)


@pytest.fixture
def golden(ctx3):
    """[1,-1,-1]: α = (1+√5)/2."""
    return make_bqf(ctx3, 1, -1, -1)
