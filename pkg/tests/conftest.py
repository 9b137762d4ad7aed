from fractions import Fraction

import pytest

from app.config import get_settings
from app.utils.groups import DyadicGroup, IntegerGroup, RealGroup
from app.utils.locally_compact import sigma_sequence
from app.utils.onepoint import compactify
from app.utils.space import DiscreteIntegers, DyadicIntegers, Reals


@pytest.fixture
def discrete():
    return DiscreteIntegers()


@pytest.fixture
def reals():
    return Reals()


@pytest.fixture
def z2():
    return DyadicIntegers()


@pytest.fixture
def discrete_ssq(discrete):
    return sigma_sequence(discrete)


@pytest.fixture
def reals_ssq(reals):
    return sigma_sequence(reals)


@pytest.fixture
def discrete_star(discrete):
    return compactify(discrete)


@pytest.fixture
def reals_star(reals):
    return compactify(reals)


@pytest.fixture
def z_group():
    return IntegerGroup()


@pytest.fixture
def real_group():
    return RealGroup()


@pytest.fixture
def dyadic_group():
    return DyadicGroup()


@pytest.fixture
def settings_env(monkeypatch):
    """Settings rebuilt from a patched environment, restored afterwards."""
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()


def q(text: str) -> Fraction:
    return Fraction(text)
