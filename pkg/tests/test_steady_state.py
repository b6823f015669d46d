import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscillator_laser.checks import random_parameters
from oscillator_laser.errors import AboveThreshold
from oscillator_laser.params import LaserParams, threshold_inversion, validate
from oscillator_laser.spectra import field_spectrum_values, line_variance
from oscillator_laser.steady_state import (
    admissible_upper,
    balance,
    photon_number_given_population,
    residual_report,
    solve_operating_point,
)

# independent solve: scipy brentq on the energy balance, xtol 1e-14
FROZEN_NE = 28.652297911137115
FROZEN_N = 0.2129109355106691


def test_preset_operating_point(sr_state):
    assert sr_state.n_e == pytest.approx(FROZEN_NE, rel=1e-10)
    assert sr_state.n == pytest.approx(FROZEN_N, rel=1e-10)
    assert sr_state.n_g == pytest.approx(100 - FROZEN_NE, rel=1e-10)
    assert sr_state.sigma == pytest.approx(2 * 50 * FROZEN_N / 34, rel=1e-10)


def test_operating_point_satisfies_stationary_equations(sr_state, sr_params):
    res = residual_report(sr_state, sr_params, relative=True)
    assert set(res) == {"photon", "sigma", "dipole", "energy"}
    assert max(res.values()) <= 1e-9
    assert sr_state.residual_max <= 1e-9


def test_zero_pump_gives_zero_state(sr_params):
    s = solve_operating_point(sr_params.with_(pump=0.0))
    assert (s.n, s.n_e, s.sigma, s.dipole_d, s.n_g) == (0.0, 0.0, 0.0, 0.0, 100.0)


@pytest.mark.parametrize("pump", [0.1, 1.0, 3.0])
def test_uncoupled_population(pump):
    p = validate(LaserParams(0.0, 50.0, 50.0, pump=pump, n_emitters=100, coupling_f=0.5))
    s = solve_operating_point(p)
    assert s.n_e == pytest.approx(pump * 100 / (pump + 1), rel=1e-12)
    assert s.n == 0.0


def test_photon_number_is_field_spectrum_mass(sr_params, sr_state):
    quad = line_variance(lambda w: field_spectrum_values(sr_state, sr_params, w), sr_params)
    assert quad == pytest.approx(sr_state.n, rel=1e-9)


def test_photon_number_rejects_threshold(sr_params):
    n_th = threshold_inversion(sr_params)
    ne_at_threshold = 0.5 * (100 + n_th)
    with pytest.raises(AboveThreshold):
        photon_number_given_population(ne_at_threshold, sr_params)


def test_photon_number_rejects_out_of_range(sr_params):
    with pytest.raises(ValueError):
        photon_number_given_population(-1.0, sr_params)


def test_admissible_upper_below_threshold(sr_params):
    up = admissible_upper(sr_params)
    assert 2 * up - 100 < threshold_inversion(sr_params)
    assert balance(up, sr_params) > 0 > balance(0.0, sr_params)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_random_operating_points_consistent(seed):
    p = random_parameters(np.random.default_rng(seed))
    s = solve_operating_point(p)
    assert 0 <= s.n_e <= p.n_emitters
    assert s.n >= 0
    assert s.inversion < threshold_inversion(p)
    assert max(residual_report(s, p, relative=True).values()) <= 1e-9


def test_photon_number_increases_with_pump(sr_params):
    ns = [solve_operating_point(sr_params.with_(pump=p)).n for p in np.arange(0, 3.01, 0.25)]
    assert np.all(np.diff(ns) > 0)


def test_as_dict_keys(sr_state):
    assert set(sr_state.as_dict()) == {"n", "n_e", "n_g", "inversion", "sigma", "dipole_d", "residual_max"}
    assert not math.isnan(sr_state.residual_max)
