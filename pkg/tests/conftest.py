from fractions import Fraction

import pytest

from oscillator_laser.experiments import preset_params
from oscillator_laser.params import LaserParams, validate
from oscillator_laser.steady_state import solve_operating_point


@pytest.fixture(scope="session")
def sr_params():
    """Preset LED at P = 0.7 and 2 kappa / gamma_perp = 2."""
    return preset_params(0.7, sr_ratio=Fraction(2))


@pytest.fixture(scope="session")
def sr_state(sr_params):
    return solve_operating_point(sr_params)


@pytest.fixture(scope="session")
def uncoupled_params():
    return validate(LaserParams(0.0, 50.0, 50.0, pump=1.0, n_emitters=100, coupling_f=0.5))


@pytest.fixture(scope="session")
def uncoupled_state(uncoupled_params):
    return solve_operating_point(uncoupled_params)
