import numpy as np
import pytest

from wavedesal.geometry import DesignVector, build_geometry, hydrostatic_stiffness
from wavedesal.params import load_params
from wavedesal.waves import SeaState
from wavedesal.workflows import PipelineContext

FIXTURE_DIR = "tests/fixtures"


@pytest.fixture(scope="session")
def params():
    return load_params()


@pytest.fixture(scope="session")
def nominal_design():
    return DesignVector.nominal()


@pytest.fixture(scope="session")
def nominal_geometry(params, nominal_design):
    return build_geometry(nominal_design, params)


@pytest.fixture(scope="session")
def nominal_khs(params, nominal_geometry):
    return hydrostatic_stiffness(
        nominal_geometry, params.general.rho_water, params.general.gravity
    )


@pytest.fixture(scope="session")
def nominal_seastate():
    return SeaState(Hs=2.64, Tp=9.86)


@pytest.fixture(scope="session")
def context(params, nominal_seastate):
    return PipelineContext(params=params, seastate=nominal_seastate)


@pytest.fixture(scope="session")
def solver_grid(params):
    s = params.solver
    n = int(round((s.omega_max - s.omega_min) / s.omega_step)) + 1
    return s.omega_min + s.omega_step * np.arange(n)
