from fractions import Fraction

import pytest

from nestquad.moments import MomentSequence
from nestquad.ratpoly import Polynomial


@pytest.fixture(scope="session")
def beta_half():
    return MomentSequence.from_distribution("beta:1/2,1/2")


@pytest.fixture(scope="session")
def uniform():
    return MomentSequence.from_distribution("uniform:-1,1")


@pytest.fixture(scope="session")
def gauss():
    return MomentSequence.from_distribution("gauss")


@pytest.fixture(scope="session")
def beta23():
    return MomentSequence.from_distribution("beta:2,3")


def poly(*coeffs):
    """Ascending coefficients, strings allowed."""
    return Polynomial(Fraction(c) for c in coeffs)


T = Polynomial([0, 1])
ONE = Polynomial([1])
