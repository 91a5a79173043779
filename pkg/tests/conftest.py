import warnings

import pytest

from openquad import model as mdl
from openquad import ness as ns
from openquad import spectra as sp


def steady(model, uniqueness_tol=1e-10):
    """Normal modes + two-point matrix, quieting zero-rapidity chatter."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp.ZeroRapidityWarning)
        modes = sp.normal_modes(sp.structure_matrix(model))
        T = ns.ness_two_point(modes, uniqueness_tol=uniqueness_tol)
    return modes, T


@pytest.fixture
def redfield_n2():
    return mdl.xy_redfield_model(mdl.ChainParams(2, 0.5, 0.9))


@pytest.fixture
def redfield_n3():
    return mdl.xy_redfield_model(mdl.ChainParams(3, 0.6, 0.4))


@pytest.fixture
def lindblad_n2():
    return mdl.xy_lindblad_model(mdl.ChainParams(2, 0.5, 0.9))


def random_antisymmetric(rng, dim, complex_=True):
    a = rng.normal(size=(dim, dim))
    if complex_:
        a = a + 1j * rng.normal(size=(dim, dim))
    return a - a.T
