import math

import pytest

from lambda_fluor.model import SystemParams


@pytest.fixture
def narrow():
    return SystemParams(gamma1=1, gamma2=1, omega1=3, omega2=3, detuning=0, splitting=0.1, p=1)


@pytest.fixture
def narrow_opt(narrow):
    return narrow.replace(detuning=math.sqrt(17.01))


@pytest.fixture
def sidebands():
    return SystemParams(gamma1=1, gamma2=1, omega1=4, omega2=4, detuning=0, splitting=0.5, p=0.8)
