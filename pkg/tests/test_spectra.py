import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscillator_laser.checks import local_maxima, random_parameters
from oscillator_laser.errors import DivisionByZeroRate, GridMismatch
from oscillator_laser.experiments import preset_params
from oscillator_laser.params import derive_rates, inverse_threshold
from oscillator_laser.spectra import (
    FrequencyGrid,
    SpectrumKind,
    default_grid,
    field_population_convolution,
    field_spectrum,
    field_spectrum_values,
    photon_fluctuation_spectrum,
    population_fluctuation_spectrum,
    population_variance_decomposition,
    pump_decay_variance,
    sigma_fluctuation_spectrum,
    simplified_population_spectrum,
    spectrum_variance,
)
from oscillator_laser.steady_state import solve_operating_point

ALL_KINDS = [field_spectrum, photon_fluctuation_spectrum, sigma_fluctuation_spectrum,
             population_fluctuation_spectrum, simplified_population_spectrum]


class TestFrequencyGrid:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([0.0, 2.0, 1.0]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([0.0, np.inf]))

    def test_rejects_false_symmetry(self):
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([-1.0, 0.0, 2.0]), symmetric=True)

    def test_symmetric_uniform(self):
        g = FrequencyGrid.symmetric_uniform(10.0, 5)
        assert g.symmetric and g.is_uniform
        np.testing.assert_array_equal(g.points, [-10, -5, 0, 5, 10])

    def test_default_grid_covers_sidebands(self, sr_state, sr_params):
        g = default_grid(sr_state, sr_params)
        assert len(g) == 2048 and g.symmetric
        assert g.points[-1] >= 4 * (50 + 50)


def test_axis_metadata():
    assert SpectrumKind.FIELD.axis == "optical_detuning"
    assert SpectrumKind.FIELD_POPULATION_CONVOLUTION.axis == "optical_detuning"
    assert SpectrumKind.PHOTON_FLUCT.axis == "fluctuation_frequency"


@pytest.mark.parametrize("builder", ALL_KINDS)
def test_even_and_nonnegative(builder, sr_state, sr_params):
    g = default_grid(sr_state, sr_params, 512)
    spec = builder(sr_state, sr_params, g)
    assert np.all(spec.values >= 0)
    np.testing.assert_array_equal(spec.values, spec.values[::-1])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_spectra_nonnegative_on_random_states(seed):
    p = random_parameters(np.random.default_rng(seed))
    s = solve_operating_point(p)
    g = default_grid(s, p, 256)
    for builder in ALL_KINDS:
        assert np.all(builder(s, p, g).values >= 0)


class TestFieldSpectrum:
    def test_zero_population(self, sr_params):
        s = solve_operating_point(sr_params.with_(pump=0.0))
        assert np.all(field_spectrum(s, sr_params, np.linspace(-500, 500, 11)).values == 0)

    def test_sideband_near_150(self, sr_state, sr_params):
        w = np.linspace(0, 400, 40001)
        peaks, _ = local_maxima(w, field_spectrum(sr_state, sr_params, w).values)
        assert len(peaks) == 1 and 100 <= peaks[0] <= 200

    def test_sideband_at_analytic_maximum(self, sr_state, sr_params):
        # maximum of 1/((a - x)^2 + b^2 x) over x = omega^2 sits at x = a - b^2/2
        k, g = sr_params.kappa, sr_params.gamma_perp
        a = (1 - sr_state.inversion * inverse_threshold(sr_params)) * k * g / 2
        b = k + g / 2
        w_star = math.sqrt(a - b * b / 2)
        vals = field_spectrum(sr_state, sr_params, [w_star - 1e-3, w_star, w_star + 1e-3]).values
        assert vals[1] > vals[0] and vals[1] > vals[2]

    def test_mass_equals_photon_number(self, sr_state, sr_params):
        spec = field_spectrum(sr_state, sr_params, [0.0])
        assert spectrum_variance(spec) == pytest.approx(sr_state.n, rel=1e-9)


class TestPhotonFluctuations:
    def test_thermal_variance(self, sr_state, sr_params):
        var = spectrum_variance(photon_fluctuation_spectrum(sr_state, sr_params, [0.0]))
        assert var == pytest.approx(sr_state.n * (sr_state.n + 1), rel=1e-9)

    # independent value: scipy quad of the inverted-matrix spectrum, at the 1/30 preset
    def test_thermal_variance_frozen(self):
        p = preset_params(1.0, sr_ratio=Fraction(1, 30))
        s = solve_operating_point(p)
        assert s.n == pytest.approx(0.23943528744721237, rel=1e-9)
        var = spectrum_variance(photon_fluctuation_spectrum(s, p, [0.0]))
        assert var == pytest.approx(0.23943528744721237 * 1.23943528744721237, rel=1e-9)

    def test_sideband_near_twice_field_sideband(self, sr_state, sr_params):
        w = np.linspace(0, 1000, 20001)
        fpk, _ = local_maxima(w, field_spectrum(sr_state, sr_params, w).values)
        ppk, _ = local_maxima(w, photon_fluctuation_spectrum(sr_state, sr_params, w).values)
        assert ppk[0] / fpk[0] == pytest.approx(2.0, abs=0.4)
        assert ppk[0] == pytest.approx(303.0, abs=0.1)


class TestSigmaFluctuations:
    def test_undefined_without_coupling(self, uncoupled_state, uncoupled_params):
        with pytest.raises(DivisionByZeroRate):
            sigma_fluctuation_spectrum(uncoupled_state, uncoupled_params, [0.0])

    def test_zero_state(self, sr_params):
        s = solve_operating_point(sr_params.with_(pump=0.0))
        assert np.all(sigma_fluctuation_spectrum(s, sr_params, np.linspace(-100, 100, 9)).values == 0)


class TestPopulation:
    def test_uncoupled_is_lorentzian(self, uncoupled_state, uncoupled_params):
        w = np.linspace(-30, 30, 61)
        vals = population_fluctuation_spectrum(uncoupled_state, uncoupled_params, w).values
        np.testing.assert_allclose(vals, 100 / (w * w + 4), rtol=1e-15)

    def test_simplified_equals_full_without_coupling(self, uncoupled_state, uncoupled_params):
        w = np.linspace(-30, 30, 61)
        np.testing.assert_array_equal(
            population_fluctuation_spectrum(uncoupled_state, uncoupled_params, w).values,
            simplified_population_spectrum(uncoupled_state, uncoupled_params, w).values)

    def test_simplified_variance(self, sr_state, sr_params):
        expected = (sr_params.pump * sr_state.n_g + sr_state.n_e) / (2 * (sr_params.pump + 1))
        spec = simplified_population_spectrum(sr_state, sr_params, [0.0])
        assert spectrum_variance(spec) == pytest.approx(expected, rel=1e-9)
        assert pump_decay_variance(sr_state, sr_params) == pytest.approx(expected, rel=1e-15)

    def test_uncoupled_decomposition(self, uncoupled_state, uncoupled_params):
        d = population_variance_decomposition(uncoupled_state, uncoupled_params)
        assert (d.total, d.pump_decay_part, d.field_polarization_part) == pytest.approx((25.0, 25.0, 0.0), abs=1e-12)

    def test_decomposition_sums(self, sr_state, sr_params):
        d = population_variance_decomposition(sr_state, sr_params)
        assert d.total == d.pump_decay_part + d.field_polarization_part
        assert d.pump_decay_part > 0 and d.field_polarization_part > 0
        full = spectrum_variance(population_fluctuation_spectrum(sr_state, sr_params, [0.0]))
        assert full == pytest.approx(d.total, rel=1e-9)

    # independent values: scipy quad of Omega^2 S_sigma_sigma / (w^2 + gamma_P^2) from inverted matrices
    @pytest.mark.parametrize("pump,ratio,field_part,pump_part", [
        (0.5, Fraction(2), 5.9478610783612424, 20.61819074173984),
        (0.5, Fraction(1, 30), 5.32021774258269, 20.76017724724651),
        (3.0, Fraction(2), 58.19769142928095, 26.281335997012466),
        (3.0, Fraction(1, 30), 16.358571942456408, 22.198598282200276),
    ])
    def test_decomposition_frozen(self, pump, ratio, field_part, pump_part):
        p = preset_params(pump, sr_ratio=ratio)
        d = population_variance_decomposition(solve_operating_point(p), p)
        assert d.field_polarization_part == pytest.approx(field_part, rel=1e-8)
        assert d.pump_decay_part == pytest.approx(pump_part, rel=1e-10)

    def test_coupling_limit_approaches_simplified(self, sr_params):
        w = np.linspace(-20, 20, 41)
        prev = math.inf
        for om in (1.0, 0.1, 0.01):
            p = sr_params.with_(omega_rabi=om)
            s = solve_operating_point(p)
            gap = np.max(np.abs(population_fluctuation_spectrum(s, p, w).values
                                / simplified_population_spectrum(s, p, w).values - 1))
            assert gap < prev
            prev = gap
        assert prev < 1e-6

    def test_gamma_p_scaling_of_pump_term(self, sr_state, sr_params):
        base = simplified_population_spectrum(sr_state, sr_params, [0.0]).values[0]
        gp = derive_rates(sr_params).gamma_p
        assert base == pytest.approx((sr_params.pump * sr_state.n_g + sr_state.n_e) / gp ** 2)


class TestConvolution:
    def _pair(self, state, params, grid):
        return field_spectrum(state, params, grid), population_fluctuation_spectrum(state, params, grid)

    def test_mass_identity(self, sr_state, sr_params):
        g = FrequencyGrid.symmetric_uniform(2e4, 50001)
        conv = field_population_convolution(*self._pair(sr_state, sr_params, g))
        mass = np.trapezoid(conv.values, g.points) / (2 * np.pi)
        d = population_variance_decomposition(sr_state, sr_params)
        assert mass == pytest.approx(sr_state.n * d.total, rel=1e-4)

    def test_fubini_on_default_grid(self, sr_state, sr_params):
        # integrating the closed-form shifts gives n times the discrete population mass exactly
        g = default_grid(sr_state, sr_params)
        field, pop = self._pair(sr_state, sr_params, g)
        conv = field_population_convolution(field, pop)
        step = g.points[1] - g.points[0]
        pop_mass = np.trapezoid(pop.values, dx=step) / (2 * np.pi)
        assert spectrum_variance(conv) == pytest.approx(sr_state.n * pop_mass, rel=1e-8)

    def test_matches_double_loop(self, sr_state, sr_params):
        g = FrequencyGrid.symmetric_uniform(300, 61)
        conv = field_population_convolution(*self._pair(sr_state, sr_params, g))
        w = g.points
        pop = population_fluctuation_spectrum(sr_state, sr_params, w).values
        wt = np.full(w.size, w[1] - w[0])
        wt[[0, -1]] /= 2
        brute = np.zeros(w.size)
        for j in range(w.size):
            for k in range(w.size):
                brute[j] += field_spectrum(sr_state, sr_params, [w[j] - w[k]]).values[0] * pop[k] * wt[k]
        np.testing.assert_allclose(conv.values, brute / (2 * np.pi), rtol=1e-12)

    def test_resolution_convergence(self, sr_state, sr_params):
        g = FrequencyGrid.symmetric_uniform(300, 1201)
        conv = field_population_convolution(*self._pair(sr_state, sr_params, g))
        fine = np.linspace(-300, 300, 4801)
        pop = population_fluctuation_spectrum(sr_state, sr_params, fine).values
        wt = np.full(fine.size, fine[1] - fine[0])
        wt[[0, -1]] /= 2
        ref = np.array([field_spectrum_values(sr_state, sr_params, wj - fine) @ (pop * wt) for wj in g.points])
        np.testing.assert_allclose(conv.values, ref / (2 * np.pi), rtol=1e-6)

    def test_even_nonnegative(self, sr_state, sr_params):
        g = default_grid(sr_state, sr_params)
        conv = field_population_convolution(*self._pair(sr_state, sr_params, g))
        assert np.all(conv.values >= 0)
        np.testing.assert_allclose(conv.values, conv.values[::-1], rtol=1e-10, atol=1e-300)
        # the narrow population kernel keeps the field's sideband doublet
        peaks, _ = local_maxima(g.points, conv.values)
        field_peaks, _ = local_maxima(g.points, field_spectrum_values(sr_state, sr_params, g.points))
        assert len(peaks) == 2
        np.testing.assert_allclose(peaks, field_peaks, atol=2 * (g.points[1] - g.points[0]))

    def test_zero_field(self, sr_params):
        s = solve_operating_point(sr_params.with_(pump=0.0))
        g = FrequencyGrid.symmetric_uniform(100, 101)
        conv = field_population_convolution(*self._pair(s, sr_params, g))
        assert np.all(conv.values == 0)

    def test_grid_mismatch(self, sr_state, sr_params):
        a = field_spectrum(sr_state, sr_params, FrequencyGrid.symmetric_uniform(100, 101))
        b = population_fluctuation_spectrum(sr_state, sr_params, FrequencyGrid.symmetric_uniform(100, 51))
        with pytest.raises(GridMismatch):
            field_population_convolution(a, b)

    def test_needs_symmetric_uniform_grid(self, sr_state, sr_params):
        g = FrequencyGrid(np.array([0.0, 1.0, 3.0]))
        with pytest.raises(GridMismatch):
            field_population_convolution(*self._pair(sr_state, sr_params, g))

    def test_wrong_kinds(self, sr_state, sr_params):
        g = FrequencyGrid.symmetric_uniform(100, 11)
        f, _ = self._pair(sr_state, sr_params, g)
        with pytest.raises(GridMismatch):
            field_population_convolution(f, f)
