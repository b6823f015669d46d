"""Parameter sweeps and the preset figure jobs.

The presets describe a quantum-dot-like LED: Omega = 34, N0 = 100,
f = 1/2 and kappa = 50 (rates in units of gamma_par), with gamma_perp
and the pump varied per curve.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import OLMError
from .params import LaserParams, validate
from .spectra import (
    FrequencyGrid,
    field_spectrum,
    photon_fluctuation_spectrum,
    population_fluctuation_spectrum,
    population_variance_decomposition,
)
from .steady_state import solve_operating_point

BASE = {"omega_rabi": 34.0, "kappa": 50.0, "n_emitters": 100, "coupling_f": 0.5}

# 2 kappa / gamma_perp for the five field and photon-fluctuation curves
SR_RATIOS_FIELD = (Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2))
SR_RATIOS_POPULATION = (Fraction(2), Fraction(1, 30))
PUMP_FIELD = 0.7
PUMPS_POPULATION = (1.0, 2.0, 3.0)


def gamma_perp_for_ratio(ratio, kappa=BASE["kappa"]):
    return float(2 * kappa / Fraction(ratio))


def preset_params(pump, sr_ratio=None, gamma_perp=None):
    if (sr_ratio is None) == (gamma_perp is None):
        raise ValueError("give exactly one of sr_ratio and gamma_perp")
    if gamma_perp is None:
        gamma_perp = gamma_perp_for_ratio(sr_ratio)
    return validate(LaserParams(gamma_perp=gamma_perp, pump=pump, **BASE))


# -- sweeps -----------------------------------------------------------------

SWEEP_VARIABLES = ("pump", "gamma_perp", "omega_rabi", "kappa")
QUANTITIES = ("n", "n_e", "population_variance", "pump_decay", "field_polarization")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if not self.step > 0:
            raise ValueError("sweep step must be positive")
        if not self.start <= self.stop:
            raise ValueError("sweep start must not exceed stop")

    def values(self):
        """Grid from start to stop; stop is included if reached within 1e-12."""
        count = int(math.floor((self.stop - self.start) / self.step + 1e-12)) + 1
        pts = self.start + self.step * np.arange(count)
        if abs(pts[-1] - self.stop) <= 1e-12 * max(1.0, abs(self.stop)):
            pts[-1] = self.stop
        return pts


@dataclass(frozen=True)
class SweepRow:
    value: float
    result: float
    reason: str = ""


def evaluate_quantity(params, quantity):
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    state = solve_operating_point(params)
    if quantity == "n":
        return state.n
    if quantity == "n_e":
        return state.n_e
    dec = population_variance_decomposition(state, params)
    return {"population_variance": dec.total, "pump_decay": dec.pump_decay_part,
            "field_polarization": dec.field_polarization_part}[quantity]


def _sweep_point(args):
    base, variable, value, quantity = args
    try:
        params = validate(LaserParams(**{**base, variable: float(value)}))
        return SweepRow(float(value), float(evaluate_quantity(params, quantity)))
    except OLMError as exc:
        return SweepRow(float(value), math.nan, type(exc).__name__)


def sweep(spec, quantity, base, workers=1):
    """Evaluate ``quantity`` at every sweep value.

    ``base`` is a mapping of :class:`LaserParams` fields.  Points that
    fail (bad parameters or a numerical error) become NaN rows naming the
    error, and the remaining points still run.  Rows come back in sweep
    order whatever the number of workers.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    jobs = [(dict(base), spec.variable, v, quantity) for v in spec.values()]
    if workers <= 1:
        return [_sweep_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, jobs))


# -- figures ----------------------------------------------------------------

class FigureId(enum.Enum):
    FIELD_SPECTRA = "FieldSpectra"
    PHOTON_FLUCT_SPECTRA = "PhotonFluctSpectra"
    POPULATION_SPECTRA = "PopulationSpectra"
    POPULATION_DISPERSION = "PopulationDispersion"


@dataclass(frozen=True)
class Curve:
    label: str
    pump: float
    sr_ratio: Fraction

    @property
    def params(self):
        return preset_params(self.pump, sr_ratio=self.sr_ratio)


@dataclass(frozen=True)
class FigureJob:
    figure_id: FigureId
    curves: tuple
    omega_max: float = 0.0
    n_points: int = 0
    pumps: tuple = field(default=())

    @property
    def x_label(self):
        return "pump" if self.figure_id is FigureId.POPULATION_DISPERSION else "omega_over_gamma_par"


FIGURES = {
    FigureId.FIELD_SPECTRA: FigureJob(
        FigureId.FIELD_SPECTRA,
        tuple(Curve(f"2kappa/gamma_perp={r}", PUMP_FIELD, r) for r in SR_RATIOS_FIELD),
        omega_max=400.0, n_points=801),
    FigureId.PHOTON_FLUCT_SPECTRA: FigureJob(
        FigureId.PHOTON_FLUCT_SPECTRA,
        tuple(Curve(f"2kappa/gamma_perp={r}", PUMP_FIELD, r) for r in SR_RATIOS_FIELD),
        omega_max=800.0, n_points=801),
    FigureId.POPULATION_SPECTRA: FigureJob(
        FigureId.POPULATION_SPECTRA,
        tuple(Curve(f"2kappa/gamma_perp={r},P={p:g}", p, r)
              for r in SR_RATIOS_POPULATION for p in PUMPS_POPULATION),
        omega_max=20.0, n_points=401),
    FigureId.POPULATION_DISPERSION: FigureJob(
        FigureId.POPULATION_DISPERSION,
        tuple(Curve(f"2kappa/gamma_perp={r}", 0.0, r) for r in SR_RATIOS_POPULATION),
        pumps=tuple(np.round(np.arange(0.0, 3.0 + 1e-12, 0.05), 10))),
}


@dataclass(frozen=True)
class CurveData:
    curve: Curve
    x: np.ndarray
    columns: dict  # column name -> array


def _normalized_photon_fluct(state, params, grid):
    spec = photon_fluctuation_spectrum(state, params, grid)
    return np.sqrt(spec.values / (state.n * (state.n + 1)))


def run_figure(job):
    """Compute every curve of a figure job (no plotting)."""
    out = []
    if job.figure_id is FigureId.POPULATION_DISPERSION:
        for curve in job.curves:
            rows = {"total": [], "pump_decay": [], "field_polarization": []}
            for pump in job.pumps:
                params = preset_params(float(pump), sr_ratio=curve.sr_ratio)
                dec = population_variance_decomposition(solve_operating_point(params), params)
                rows["total"].append(dec.total)
                rows["pump_decay"].append(dec.pump_decay_part)
                rows["field_polarization"].append(dec.field_polarization_part)
            out.append(CurveData(curve, np.asarray(job.pumps, dtype=float),
                                 {k: np.asarray(v) for k, v in rows.items()}))
        return out

    grid = FrequencyGrid.positive(job.omega_max, job.n_points)
    for curve in job.curves:
        params = curve.params
        state = solve_operating_point(params)
        if job.figure_id is FigureId.FIELD_SPECTRA:
            values = field_spectrum(state, params, grid).values
        elif job.figure_id is FigureId.PHOTON_FLUCT_SPECTRA:
            values = _normalized_photon_fluct(state, params, grid)
        else:
            values = population_fluctuation_spectrum(state, params, grid).values
        out.append(CurveData(curve, grid.points, {"value": values}))
    return out
