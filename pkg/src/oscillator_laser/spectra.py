"""Closed-form spectra and variances of the zero- and first-order theory.

All frequencies are in units of gamma_par.  Every spectrum here is an
even rational function of omega; variances are (2 pi)^-1 times the
integral over the whole line, computed by adaptive quadrature on the
closed form rather than on a sampled grid.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import signal

from . import numerics
from .errors import DivisionByZeroRate, GridMismatch
from .params import derive_rates, inverse_threshold
from .steady_state import SteadyState


class SpectrumKind(enum.Enum):
    FIELD = "Field"
    PHOTON_FLUCT = "PhotonFluct"
    SIGMA_FLUCT = "SigmaFluct"
    POPULATION_FLUCT = "PopulationFluct"
    POPULATION_FLUCT_SIMPLIFIED = "PopulationFluctSimplified"
    FIELD_POPULATION_CONVOLUTION = "FieldPopulationConvolution"
    SIMULATED = "Simulated"

    @property
    def axis(self):
        """What omega means for this kind of spectrum.

        The field spectrum is a function of the optical detuning from the
        carrier; the others are spectra of slow fluctuations.
        """
        if self in (SpectrumKind.FIELD, SpectrumKind.FIELD_POPULATION_CONVOLUTION):
            return "optical_detuning"
        return "fluctuation_frequency"


@dataclass(frozen=True)
class FrequencyGrid:
    points: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("grid must be a non-empty 1-d array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if self.symmetric and not np.allclose(pts, -pts[::-1], rtol=0, atol=1e-12 * max(1.0, np.abs(pts).max())):
            raise ValueError("grid flagged symmetric but points are not mirrored about zero")
        object.__setattr__(self, "points", pts)

    @classmethod
    def symmetric_uniform(cls, omega_max, n_points):
        pts = np.linspace(-omega_max, omega_max, int(n_points))
        # exact +-omega pairs, so even spectra come out bit-for-bit even
        return cls(0.5 * (pts - pts[::-1]), symmetric=True)

    @classmethod
    def positive(cls, omega_max, n_points, start=0.0):
        return cls(np.linspace(start, omega_max, int(n_points)))

    def __len__(self):
        return self.points.size

    @property
    def is_uniform(self):
        d = np.diff(self.points)
        return d.size == 0 or np.allclose(d, d[0], rtol=1e-9, atol=0)


@dataclass(frozen=True)
class Spectrum:
    grid: FrequencyGrid
    values: np.ndarray
    kind: SpectrumKind
    state: SteadyState | None = None
    params: object = None
    stderr: np.ndarray | None = None
    # evaluates the underlying closed form at arbitrary frequencies
    evaluate: Callable | None = field(default=None, repr=False, compare=False)

    @property
    def omega(self):
        return self.grid.points


@dataclass(frozen=True)
class PopulationVarianceDecomposition:
    total: float
    pump_decay_part: float
    field_polarization_part: float

    def as_dict(self):
        return {
            "total": self.total,
            "pump_decay": self.pump_decay_part,
            "field_polarization": self.field_polarization_part,
        }


def _coerce_grid(grid):
    if isinstance(grid, FrequencyGrid):
        return grid
    pts = np.atleast_1d(np.asarray(grid, dtype=float))
    return FrequencyGrid(pts, symmetric=False)


def default_grid(state, params, n_points=2048):
    """Symmetric grid wide enough to hold the collective Rabi sidebands."""
    gp = derive_rates(params).gamma_p
    coupling = math.sqrt(2 * params.omega_rabi ** 2 * params.coupling_f * abs(state.inversion))
    wmax = max(10 * gp, 4 * coupling + 4 * (params.kappa + params.gamma_perp))
    return FrequencyGrid.symmetric_uniform(wmax, n_points)


# -- closed forms -----------------------------------------------------------

def field_spectrum_values(state, params, omega):
    k, g = params.kappa, params.gamma_perp
    inv = inverse_threshold(params)
    w2 = np.asarray(omega, dtype=float) ** 2
    num = 0.5 * k * g * g * state.n_e * inv
    den = ((1 - state.inversion * inv) * 0.5 * k * g - w2) ** 2 + w2 * (k + 0.5 * g) ** 2
    return num / den


def common_denominator(state, params, omega):
    """The sixth-order polynomial S(omega) shared by the binary spectra."""
    k, g = params.kappa, params.gamma_perp
    inv = inverse_threshold(params)
    w2 = np.asarray(omega, dtype=float) ** 2
    gain = 2 * k * g * (1 - state.inversion * inv)
    return (w2 + (k + 0.5 * g) ** 2) * ((gain - w2) ** 2 + w2 * (2 * k + g) ** 2)


def photon_numerator(state, params, omega):
    k, g, n0 = params.kappa, params.gamma_perp, params.n_emitters
    inv = inverse_threshold(params)
    n, ne, ng, d, inv_n = state.n, state.n_e, state.n_g, state.dipole_d, state.inversion
    w2 = np.asarray(omega, dtype=float) ** 2
    t1 = 2 * k * n * ((0.5 * g * g - w2 + k * g * (1 - inv_n * inv)) ** 2 + w2 * (k + 1.5 * g) ** 2)
    t2 = 0.5 * k * g * inv * (2 * k * (d + ne) + g * (n0 * n + ne)) * (w2 + g * g)
    t3 = k * k * g ** 3 * (n0 * d + 2 * ne * ng) * inv * inv
    t4 = 4 * k * k * n * ((k + 0.5 * g) * (w2 + g * g) - k * g * g * inv_n * inv)
    # the constant term carries a factor n; without it the variance is not n(n+1)
    t5 = 2 * k * k * g ** 3 * n0 * n * inv
    return t1 + t2 + t3 + t4 + t5


def sigma_numerator(state, params, omega):
    """S_Sigma(omega), equal to Omega^2 * delta^2 Sigma(omega) * S(omega)."""
    k, g, n0 = params.kappa, params.gamma_perp, params.n_emitters
    inv = inverse_threshold(params)
    n, ne, ng, d, inv_n = state.n, state.n_e, state.n_g, state.dipole_d, state.inversion
    w2 = np.asarray(omega, dtype=float) ** 2
    # first bracket is (g N / N_th + 4 kappa); an extra factor n there breaks the
    # agreement with the linear-system solution
    t1 = 2 * k ** 3 * g * (n * inv_n * inv) * (g * inv_n * inv + 4 * k) * (w2 + g * g)
    t2 = 0.5 * k * g * inv * (2 * k * d + g * n0 * n + (2 * k + g) * ne) * (w2 + 4 * k * k) * (w2 + g * g)
    t3 = k * k * g ** 3 * (w2 + 4 * k * k) * ((n0 * d + 2 * ne * ng) * inv * inv + 2 * n * n0 * inv)
    return t1 + t2 + t3


def pump_decay_diffusion(state, params):
    """2 D_NeNe = gamma_par (P Ng + Ne)."""
    return params.gamma_par * (params.pump * state.n_g + state.n_e)


def photon_fluctuation_values(state, params, omega):
    return photon_numerator(state, params, omega) / common_denominator(state, params, omega)


def sigma_fluctuation_values(state, params, omega):
    if params.omega_rabi == 0:
        raise DivisionByZeroRate("sigma spectrum is undefined for omega_rabi = 0")
    return sigma_numerator(state, params, omega) / (params.omega_rabi ** 2 * common_denominator(state, params, omega))


def population_field_part_values(state, params, omega):
    w2 = np.asarray(omega, dtype=float) ** 2
    if params.omega_rabi == 0:
        return np.zeros_like(w2)
    gp = derive_rates(params).gamma_p
    return sigma_numerator(state, params, omega) / ((w2 + gp * gp) * common_denominator(state, params, omega))


def population_pump_part_values(state, params, omega):
    w2 = np.asarray(omega, dtype=float) ** 2
    gp = derive_rates(params).gamma_p
    return pump_decay_diffusion(state, params) / (w2 + gp * gp)


def population_fluctuation_values(state, params, omega):
    return population_field_part_values(state, params, omega) + population_pump_part_values(state, params, omega)


_CLOSED_FORMS = {
    SpectrumKind.FIELD: field_spectrum_values,
    SpectrumKind.PHOTON_FLUCT: photon_fluctuation_values,
    SpectrumKind.SIGMA_FLUCT: sigma_fluctuation_values,
    SpectrumKind.POPULATION_FLUCT: population_fluctuation_values,
    SpectrumKind.POPULATION_FLUCT_SIMPLIFIED: population_pump_part_values,
}


def _make(kind, state, params, grid):
    grid = _coerce_grid(grid)
    fn = _CLOSED_FORMS[kind]
    values = np.asarray(fn(state, params, grid.points), dtype=float)
    return Spectrum(grid, values, kind, state, params, evaluate=lambda w: fn(state, params, w))


def field_spectrum(state, params, grid):
    """Field spectrum n(omega) versus detuning from the optical carrier."""
    return _make(SpectrumKind.FIELD, state, params, grid)


def photon_fluctuation_spectrum(state, params, grid):
    return _make(SpectrumKind.PHOTON_FLUCT, state, params, grid)


def sigma_fluctuation_spectrum(state, params, grid):
    """delta^2 Sigma(omega); raises DivisionByZeroRate when Omega = 0."""
    return _make(SpectrumKind.SIGMA_FLUCT, state, params, grid)


def population_fluctuation_spectrum(state, params, grid):
    return _make(SpectrumKind.POPULATION_FLUCT, state, params, grid)


def simplified_population_spectrum(state, params, grid):
    """Pump-decay Lorentzian only, the very-weak-excitation limit."""
    return _make(SpectrumKind.POPULATION_FLUCT_SIMPLIFIED, state, params, grid)


def field_population_convolution(field, pop):
    """Discrete convolution of the field and population spectra.

    ``values(w_j) = (2 pi)^-1 sum_k n(w_j - w_k) pop(w_k) dw_k`` with
    trapezoid weights.  The shifted field arguments run outside the grid,
    so the field factor is always taken from its closed form.
    """
    if field.kind is not SpectrumKind.FIELD or pop.kind not in (
            SpectrumKind.POPULATION_FLUCT, SpectrumKind.POPULATION_FLUCT_SIMPLIFIED):
        raise GridMismatch(f"expected (Field, PopulationFluct) spectra, got ({field.kind.value}, {pop.kind.value})")
    g1, g2 = field.grid, pop.grid
    if len(g1) != len(g2) or not np.allclose(g1.points, g2.points, rtol=1e-12, atol=0):
        raise GridMismatch("field and population spectra are on different grids")
    if not (g2.symmetric and g2.is_uniform) or len(g2) < 2:
        raise GridMismatch("convolution needs a uniform symmetric grid")

    pts = g2.points
    m = len(pts)
    step = (pts[-1] - pts[0]) / (m - 1)
    weights = np.full(m, step)
    weights[[0, -1]] *= 0.5
    pop_w = pop.values * weights / (2 * np.pi)
    state, params = field.state, field.params

    lags = step * np.arange(-(m - 1), m)
    kernel = field_spectrum_values(state, params, lags)
    values = signal.convolve(pop_w, kernel, mode="valid")
    values = np.maximum(values, 0.0)  # fft round-off in the far tails

    def evaluate(w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.empty(w.shape)
        for lo in range(0, w.size, 256):
            chunk = w.ravel()[lo:lo + 256]
            shifted = field_spectrum_values(state, params, chunk[:, None] - pts[None, :])
            out.ravel()[lo:lo + 256] = shifted @ pop_w
        return out

    return Spectrum(g2, values, SpectrumKind.FIELD_POPULATION_CONVOLUTION, state, params, evaluate=evaluate)


# -- variances --------------------------------------------------------------

def _scale_for(params):
    return params.kappa + 0.5 * params.gamma_perp


def line_variance(fn, params, rel_tol=1e-10, abs_tol=1e-14):
    """(2 pi)^-1 times the integral of ``fn`` over the real line."""
    res = numerics.integrate_line(fn, rel_tol=rel_tol, abs_tol=abs_tol, scale=_scale_for(params))
    return res.value / (2 * np.pi)


def spectrum_variance(spec, rel_tol=1e-10, abs_tol=1e-14):
    """Variance (2 pi)^-1 * integral of the spectrum over all omega.

    Integrates the closed form attached to the spectrum, not the grid
    samples.
    """
    if spec.evaluate is None:
        raise ValueError(f"{spec.kind.value} spectrum carries no closed form to integrate")
    scale = _scale_for(spec.params) if spec.params is not None else 1.0
    res = numerics.integrate_line(spec.evaluate, rel_tol=rel_tol, abs_tol=abs_tol, scale=scale)
    return res.value / (2 * np.pi)


def pump_decay_variance(state, params):
    """Closed form of the pump-decay part: D_NeNe / gamma_P."""
    return pump_decay_diffusion(state, params) / (2 * derive_rates(params).gamma_p)


def population_variance_decomposition(state, params):
    """Split delta^2 Ne into its pump-decay and field-polarization parts."""
    pump_part = pump_decay_variance(state, params)
    if params.omega_rabi == 0 or state.n_e == 0 and state.n == 0:
        field_part = 0.0
    else:
        field_part = line_variance(lambda w: population_field_part_values(state, params, w), params)
    return PopulationVarianceDecomposition(pump_part + field_part, pump_part, field_part)
