from fractions import Fraction as Fr

import pytest
from hypothesis import HealthCheck, settings

from fuchsian_cf.hypergeometric import HypergeomParams, gauss_operator
from fuchsian_cf.operator_core import make_operator
from fuchsian_cf.polynomials import Poly, RatFunc
from fuchsian_cf.scalars import GaussRat as G

settings.register_profile("suite", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

A, B, C = Fr(1, 2), Fr(1, 3), Fr(1, 4)


def poly(*cs):
    return Poly([G(c) for c in cs])


@pytest.fixture
def gauss_params():
    return HypergeomParams(G(A), G(B), G(C))


@pytest.fixture
def gauss(gauss_params):
    return gauss_operator(gauss_params)


@pytest.fixture
def pole_op():
    # y'' = 2/(1-z) y', basis {1, 1/(1-z)}
    return make_operator("standard", [RatFunc(Poly()), RatFunc(poly(2), poly(1, -1))])
