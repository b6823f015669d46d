"""Stationary operating point below the coherence threshold.

The mean photon number follows in closed form from the excited
population; the population itself is fixed by the energy balance
``2 kappa n = P (N0 - Ne) - Ne`` (rates in units of gamma_par), which is
solved by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import AboveThreshold, NoBracket, NoSignChange, NumericalError
from .params import THRESHOLD_MARGIN, inverse_threshold, threshold_inversion


@dataclass(frozen=True)
class SteadyState:
    n: float
    n_e: float
    n_g: float
    inversion: float
    sigma: float
    dipole_d: float
    residual_max: float = 0.0

    def as_dict(self):
        return {
            "n": self.n,
            "n_e": self.n_e,
            "n_g": self.n_g,
            "inversion": self.inversion,
            "sigma": self.sigma,
            "dipole_d": self.dipole_d,
            "residual_max": self.residual_max,
        }


def _check_below_threshold(inversion, params):
    n_th = threshold_inversion(params)
    if math.isfinite(n_th) and inversion >= n_th * (1 - THRESHOLD_MARGIN):
        raise AboveThreshold(f"inversion {inversion:.6g} is not below N_th = {n_th:.6g}")


def photon_number_given_population(n_e, params):
    """Mean photon number of the zero-order field for a given ``Ne``.

    Equals the integral of the field spectrum over all detunings divided
    by 2 pi.
    """
    n0 = params.n_emitters
    if not 0 <= n_e <= n0:
        raise ValueError(f"excited population {n_e} outside [0, {n0}]")
    inversion = 2.0 * n_e - n0
    _check_below_threshold(inversion, params)
    inv = inverse_threshold(params)
    k, g = params.kappa, params.gamma_perp
    # (g/2)(Ne/N_th) / ((k + g/2)(1 - N/N_th)), written to stay finite as N_th -> inf
    return 0.5 * g * n_e * inv / ((k + 0.5 * g) * (1.0 - inversion * inv))


def _state_from_population(n_e, params):
    n0 = params.n_emitters
    n = photon_number_given_population(n_e, params)
    inversion = 2.0 * n_e - n0
    if params.omega_rabi > 0:
        sigma = 2.0 * params.kappa * n / params.omega_rabi
    else:
        sigma = 0.0
    dipole = params.omega_rabi * inversion * sigma / params.gamma_perp
    return SteadyState(n=n, n_e=n_e, n_g=n0 - n_e, inversion=inversion, sigma=sigma, dipole_d=dipole)


def balance(n_e, params):
    """Energy-balance mismatch ``2 kappa n(Ne) - [P (N0 - Ne) - Ne]``."""
    n = photon_number_given_population(n_e, params)
    return 2.0 * params.kappa * n - params.gamma_par * (params.pump * (params.n_emitters - n_e) - n_e)


def admissible_upper(params):
    n0 = params.n_emitters
    n_th = threshold_inversion(params)
    if not math.isfinite(n_th):
        return float(n0)
    return min(float(n0), 0.5 * (n0 + n_th) * (1 - 1e-9))


def solve_operating_point(params, tol=None):
    """Solve for the stationary state ``{n, Ne, Ng, N, Sigma, D}``.

    Raises
    ------
    NoBracket
        If the balance has no sign change on the admissible interval.
    """
    n0 = params.n_emitters
    if params.pump == 0:
        state = SteadyState(n=0.0, n_e=0.0, n_g=float(n0), inversion=-float(n0), sigma=0.0, dipole_d=0.0)
        return _with_residuals(state, params)

    lo, hi = 0.0, admissible_upper(params)
    if hi <= lo:
        raise NoBracket(f"empty admissible interval [0, {hi:g}] for Ne")
    g_lo, g_hi = balance(lo, params), balance(hi, params)

    probes = np.linspace(lo, hi, 18)[1:-1]
    g_probe = [balance(x, params) for x in probes]
    if np.any(np.diff([g_lo, *g_probe, g_hi]) <= 0):
        raise NumericalError("energy balance is not strictly increasing in Ne; operating point may not be unique")

    if tol is None:
        tol = 1e-15 * n0  # bisection stops at float resolution anyway
    try:
        n_e = numerics.bisect(lambda x: balance(x, params), lo, hi, tol=tol)
    except NoSignChange:
        raise NoBracket(
            f"balance has no sign change on [0, {hi:.6g}]: g(0) = {g_lo:.6g}, g(hi) = {g_hi:.6g}") from None
    return _with_residuals(_state_from_population(n_e, params), params)


def _terms(state, params):
    k, g, om, f = params.kappa, params.gamma_perp, params.omega_rabi, params.coupling_f
    n, sig, d, ne, inv = state.n, state.sigma, state.dipole_d, state.n_e, state.inversion
    gpar, pump, n0 = params.gamma_par, params.pump, params.n_emitters
    return {
        "photon": (-2 * k * n, om * sig),
        "sigma": (-(k + 0.5 * g) * sig, 2 * om * f * n * inv, 2 * om * f * d, 2 * om * f * ne),
        "dipole": (-g * d, om * inv * sig),
        "energy": (2 * k * n, -gpar * pump * (n0 - ne), gpar * ne),
    }


def residual_report(state, params, relative=False):
    """Residuals of the four stationary equations.

    Keys: ``photon`` (photon-number balance), ``sigma`` (field-polarization
    energy), ``dipole`` (dipole-dipole energy) and ``energy`` (energy
    conservation).  With ``relative=True`` each residual is divided by the
    largest term of its equation.
    """
    out = {}
    for name, terms in _terms(state, params).items():
        r = abs(math.fsum(terms))
        if relative:
            scale = max(abs(t) for t in terms)
            r = r / scale if scale > 0 else r
        out[name] = r
    return out


def _with_residuals(state, params):
    res = residual_report(state, params)
    return SteadyState(**{**state.as_dict(), "residual_max": max(res.values())})
