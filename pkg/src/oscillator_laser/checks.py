"""Verification checks: closed forms against oracles, limits and figure
features.  Each check returns a :class:`CheckResult`; the ``verify``
subcommand and the acceptance tests both run these functions.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import langevin, spectra
from .experiments import PUMP_FIELD, SR_RATIOS_FIELD, SR_RATIOS_POPULATION, preset_params
from .params import LaserParams, validate
from .steady_state import (
    _state_from_population,
    admissible_upper,
    photon_number_given_population,
    residual_report,
    solve_operating_point,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_rel_err: float = math.nan
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_dict(self):
        return {"check_name": self.name, "max_rel_err": self.max_rel_err, "pass": bool(self.passed),
                "seconds": self.seconds, "detail": self.detail}


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def random_parameters(rng):
    """A random valid parameter set with a nonzero pump and coupling."""
    log_uniform = lambda lo, hi: float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
    return validate(LaserParams(
        omega_rabi=log_uniform(1.0, 100.0),
        kappa=log_uniform(1.0, 300.0),
        gamma_perp=log_uniform(1.0, 5000.0),
        pump=float(rng.uniform(0.05, 3.0)),
        n_emitters=int(rng.integers(1, 500)),
        coupling_f=float(rng.uniform(0.05, 1.0)),
    ))


def random_operating_points(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        params = random_parameters(rng)
        out.append((params, solve_operating_point(params)))
    return out


def preset_operating_points():
    """Operating points of the preset curves (field and population figures)."""
    pts = [preset_params(PUMP_FIELD, sr_ratio=r) for r in SR_RATIOS_FIELD]
    pts += [preset_params(p, sr_ratio=r) for r in SR_RATIOS_POPULATION for p in (0.5, 1.0, 2.0, 3.0)]
    return [(p, solve_operating_point(p)) for p in pts]


def local_maxima(x, y):
    """Interior strict local maxima of samples ``y(x)``."""
    y = np.asarray(y)
    idx = np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1
    return np.asarray(x)[idx], y[idx]


# -- 1, 2: thermal identity -------------------------------------------------

def _photon_variance(state, params, ger=False):
    if ger:
        fn = lambda w: langevin.photon_spectrum_via_matrix(state, params, w, ger=True)
    else:
        fn = lambda w: spectra.photon_fluctuation_values(state, params, w)
    return spectra.line_variance(fn, params)


@_timed
def check_thermal_identity(count=100, seed=1, tol=1e-6):
    """Variance of the photon-number spectrum equals n(n+1)."""
    worst = 0.0
    for params, state in random_operating_points(count, seed):
        var = _photon_variance(state, params)
        worst = max(worst, abs(var / (state.n * (state.n + 1)) - 1))
    return CheckResult("thermal_identity", worst <= tol, worst, {"states": count, "tol": tol})


@_timed
def check_ger_variant(min_deviation=0.01):
    """Dropping the 2 Ne Ng diffusion term breaks the n(n+1) variance."""
    devs = []
    for params, state in preset_operating_points():
        var = _photon_variance(state, params, ger=True)
        devs.append(var / (state.n * (state.n + 1)) - 1)
    devs = np.asarray(devs)
    smallest = float(np.abs(devs).min())
    return CheckResult("ger_variant_deviates", bool(smallest > min_deviation and np.all(devs < 0)),
                       smallest, {"relative_deviations": devs.tolist(), "min_required": min_deviation})


# -- 3: closed forms against the spectral-matrix oracle ---------------------

@_timed
def check_oracle_equivalence(count=50, seed=2, n_points=512, tol=1e-9):
    worst = {"photon": 0.0, "sigma": 0.0, "population": 0.0, "field": 0.0}
    for params, state in random_operating_points(count, seed):
        grid = spectra.default_grid(state, params, n_points)
        w = grid.points
        sm = langevin.spectral_matrix(langevin.build_binary_system(state, params), w)
        pairs = {
            "photon": (sm.entry("n", "n").real, spectra.photon_fluctuation_spectrum(state, params, grid).values),
            "sigma": (sm.entry("sigma", "sigma").real, spectra.sigma_fluctuation_spectrum(state, params, grid).values),
            "population": (langevin.population_spectrum_via_chain(state, params, grid).values,
                           spectra.population_fluctuation_spectrum(state, params, grid).values),
            "field": (langevin.spectral_matrix(langevin.build_field_system(state, params), w).entry("a+", "a").real,
                      spectra.field_spectrum(state, params, grid).values),
        }
        for key, (oracle, closed) in pairs.items():
            worst[key] = max(worst[key], float(np.max(np.abs(closed / oracle - 1))))
    m = max(worst.values())
    return CheckResult("oracle_equivalence", m <= tol, m, {"per_spectrum": worst, "tol": tol})


# -- 4: steady state --------------------------------------------------------

@_timed
def check_steady_state(count=100, seed=3, tol_photon=1e-7, tol_residual=1e-9):
    rng = np.random.default_rng(seed)
    worst_photon = 0.0
    worst_residual = 0.0
    for _ in range(count):
        params = random_parameters(rng)
        n_e = float(rng.uniform(0, admissible_upper(params)))
        state = _state_from_population(n_e, params)
        quad = spectra.line_variance(lambda w: spectra.field_spectrum_values(state, params, w), params)
        closed = photon_number_given_population(n_e, params)
        if closed > 0:
            worst_photon = max(worst_photon, abs(quad / closed - 1))
        solved = solve_operating_point(params)
        worst_residual = max(worst_residual, max(residual_report(solved, params, relative=True).values()))
    ok = worst_photon <= tol_photon and worst_residual <= tol_residual
    return CheckResult("steady_state_consistency", ok, max(worst_photon, worst_residual),
                       {"photon_number_rel_err": worst_photon, "stationary_residual_rel": worst_residual})


# -- 5, 6: field and photon-fluctuation peaks --------------------------------

def _peak_table(omega_max=1000.0, n_points=40001):
    w = np.linspace(0.0, omega_max, n_points)
    rows = []
    for ratio in SR_RATIOS_FIELD:
        params = preset_params(PUMP_FIELD, sr_ratio=ratio)
        state = solve_operating_point(params)
        fw, fh = local_maxima(w, spectra.field_spectrum_values(state, params, w))
        pw, ph = local_maxima(w, spectra.photon_fluctuation_values(state, params, w))
        rows.append({"sr_ratio": str(ratio), "field_peaks": fw.tolist(), "field_heights": fh.tolist(),
                     "photon_peaks": pw.tolist(), "photon_heights": ph.tolist()})
    return rows


@_timed
def check_field_peaks():
    """Curves 2-5 have a sideband maximum in [100, 200]; curve 1 has none;
    heights grow from curve 2 to curve 5."""
    rows = _peak_table()
    ok = not rows[0]["field_peaks"]
    heights = []
    for row in rows[1:]:
        inside = [(w, h) for w, h in zip(row["field_peaks"], row["field_heights"]) if 100 <= w <= 200]
        ok &= bool(inside)
        heights.append(max(h for _, h in inside) if inside else math.nan)
    ok &= bool(np.all(np.diff(heights) > 0))
    return CheckResult("field_spectrum_peaks", bool(ok), detail={"curves": rows, "heights_2_to_5": heights})


@_timed
def check_photon_peak_doubling(lo=1.6, hi=2.4):
    """Sideband maximum of the photon-number spectrum sits at 1.6-2.4 times
    the field sideband frequency for curves 3-5."""
    rows = _peak_table()
    ratios = []
    ok = True
    for row in rows[2:]:
        if not row["field_peaks"] or not row["photon_peaks"]:
            ratios.append(None)
            ok = False
            continue
        r = row["photon_peaks"][int(np.argmax(row["photon_heights"]))] / row["field_peaks"][0]
        ratios.append(r)
        ok &= lo <= r <= hi
    return CheckResult("photon_peak_doubling", bool(ok), detail={"ratios_curves_3_to_5": ratios, "curves": rows[2:]})


# -- 7, 8: population spectra and dispersion --------------------------------

def _pop(pump, ratio, w):
    params = preset_params(pump, sr_ratio=ratio)
    state = solve_operating_point(params)
    return spectra.population_fluctuation_values(state, params, w)


@_timed
def check_population_spectra(coincide_tol=0.10):
    w = np.linspace(-20.0, 20.0, 801)
    sr, non_sr = SR_RATIOS_POPULATION
    a, b = _pop(1.0, sr, w), _pop(1.0, non_sr, w)
    rel = float(np.max(np.abs(a / b - 1)))
    z = np.zeros(1)
    margin = float(_pop(3.0, sr, z)[0] - _pop(3.0, non_sr, z)[0])
    return CheckResult("population_spectra", rel <= coincide_tol and margin > 0, rel,
                       {"pointwise_rel_diff_P1": rel, "sr_minus_non_sr_at_0_P3": margin})


def _decomposition(pump, ratio):
    params = preset_params(pump, sr_ratio=ratio)
    return spectra.population_variance_decomposition(solve_operating_point(params), params)


@_timed
def check_population_dispersion(agree_tol=0.05, pumps=tuple(np.round(np.arange(0.1, 1.0 + 1e-9, 0.1), 10))):
    sr, non_sr = SR_RATIOS_POPULATION
    low = {str(r): _decomposition(0.5, r) for r in (sr, non_sr)}
    high = _decomposition(3.0, sr)
    pump_dominates = all(d.pump_decay_part > d.field_polarization_part for d in low.values())
    field_dominates = high.field_polarization_part > high.pump_decay_part
    diffs = [(p, _decomposition(p, sr).total / _decomposition(p, non_sr).total - 1) for p in pumps]
    worst = max(abs(d) for _, d in diffs)
    return CheckResult(
        "population_dispersion", pump_dominates and field_dominates and worst <= agree_tol, worst,
        {"P0.5": {k: v.as_dict() for k, v in low.items()}, "P3_sr": high.as_dict(),
         "pump_dominates_P0.5": pump_dominates, "field_dominates_P3": field_dominates,
         "total_rel_diff_by_pump": diffs})


# -- 9: Monte Carlo ---------------------------------------------------------

@_timed
def check_monte_carlo(n_trajectories=400, seed=11, dt=5e-5, record_every=10, segment=2000, segments=15,
                      band_tol=0.05, z_max=3.0):
    """Welch spectra of the binary system against the closed forms, plus
    the Ornstein-Uhlenbeck calibration."""
    detail = {}
    ok = True
    worst = 0.0

    # OU calibration: A = -1, 2D = 2, variance D / gamma = 1
    ou = langevin.LinearLangevinSystem(np.array([[-1.0]]), np.array([[2.0]]), ("x",))
    ens = langevin.simulate_time_domain(ou, 1e-3, 200_000, 200, seed, record_every=10)
    per_traj = ens.channel("x").var(axis=1)
    var, se = float(per_traj.mean()), float(per_traj.std(ddof=1) / math.sqrt(per_traj.size))
    detail["ou_variance"] = {"value": var, "stderr": se}
    ok &= abs(var - 1.0) <= z_max * se

    params = preset_params(PUMP_FIELD, sr_ratio=SR_RATIOS_FIELD[-1])
    state = solve_operating_point(params)
    system = langevin.build_binary_system(state, params)
    band = langevin.slowest_decay_rate(system)
    n_steps = segment * (segments + 1) // 2 * record_every
    ens = langevin.simulate_time_domain(system, dt, n_steps, n_trajectories, seed, record_every=record_every,
                                        channels=("n", "sigma"))
    for channel, closed in (("n", spectra.photon_fluctuation_values), ("sigma", spectra.sigma_fluctuation_values)):
        est = langevin.welch_spectrum(ens, segment, 0.5, channel=channel)
        w = est.omega
        inside = w <= band
        exact = closed(state, params, w[inside])
        rel = np.abs(est.values[inside] / exact - 1)
        z = np.abs(est.values[inside] - exact) / est.stderr[inside]
        detail[channel] = {"band": band, "bins": int(inside.sum()), "max_rel": float(rel.max()),
                           "max_z": float(z.max())}
        worst = max(worst, float(rel.max()))
        ok &= bool(rel.max() <= band_tol and z.max() <= z_max)
    return CheckResult("monte_carlo", bool(ok), worst, detail)


# -- 10: trivial limits -----------------------------------------------------

@_timed
def check_trivial_limits(tol=1e-9):
    errs = {}
    zero = solve_operating_point(validate(LaserParams(34, 50, 50, pump=0.0, n_emitters=100, coupling_f=0.5)))
    errs["zero_pump"] = max(abs(zero.n), abs(zero.n_e), abs(zero.sigma), abs(zero.dipole_d))

    for pump in (0.3, 1.0, 2.5):
        params = validate(LaserParams(0.0, 50, 50, pump=pump, n_emitters=100, coupling_f=0.5))
        state = solve_operating_point(params)
        expect_ne = pump * 100 / (pump + 1)
        errs[f"ne_P{pump}"] = abs(state.n_e / expect_ne - 1)
        dec = spectra.population_variance_decomposition(state, params)
        expect_var = (pump * state.n_g + state.n_e) / (2 * (pump + 1))
        errs[f"var_P{pump}"] = abs(dec.total / expect_var - 1)
        quad = spectra.spectrum_variance(spectra.simplified_population_spectrum(state, params, [0.0]))
        errs[f"quad_P{pump}"] = abs(quad / expect_var - 1)
        w = np.linspace(-50, 50, 101)
        lorentz = (pump * state.n_g + state.n_e) / (w * w + (pump + 1) ** 2)
        got = spectra.population_fluctuation_values(state, params, w)
        errs[f"lorentzian_P{pump}"] = float(np.max(np.abs(got / lorentz - 1)))
    worst = max(errs.values())
    return CheckResult("trivial_limits", worst <= tol, worst, errs)


ORACLE_CHECKS = (check_thermal_identity, check_ger_variant, check_oracle_equivalence,
                 check_steady_state, check_trivial_limits)
FIGURE_CHECKS = (check_field_peaks, check_photon_peak_doubling, check_population_spectra,
                 check_population_dispersion)


def run_checks(include_figures=False, include_monte_carlo=False):
    checks = list(ORACLE_CHECKS)
    if include_figures:
        checks += FIGURE_CHECKS
    if include_monte_carlo:
        checks.append(check_monte_carlo)
    return [c() for c in checks]
