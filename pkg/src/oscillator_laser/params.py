"""Laser parameters, validation, normalization and derived rates.

Internally every rate is measured in units of the upper-level
population decay rate ``gamma_par``; after :func:`validate` that rate is
exactly 1.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import ParameterError

UNITS = ("gamma_par", "rad_per_s")

# threshold guard shared by every function that rejects N >= N_th
THRESHOLD_MARGIN = 1e-12


@dataclass(frozen=True)
class LaserParams:
    """Physical inputs of the two-level laser.

    Rates may be given in units of ``gamma_par`` (the default) or in
    rad/s with ``units="rad_per_s"``; :func:`validate` divides every rate
    by ``gamma_par`` either way.
    """

    omega_rabi: float
    kappa: float
    gamma_perp: float
    gamma_par: float = 1.0
    pump: float = 0.0
    n_emitters: int = 1
    coupling_f: float = 1.0
    units: str = "gamma_par"


@dataclass(frozen=True)
class ValidatedParams:
    """Normalized parameters; all rates in units of ``gamma_par``.

    ``rate_scale`` is the original ``gamma_par`` in rad/s when the input
    was given in rad/s (1.0 otherwise), so frequencies can be converted
    back for display.
    """

    omega_rabi: float
    kappa: float
    gamma_perp: float
    pump: float
    n_emitters: int
    coupling_f: float
    rate_scale: float = 1.0
    gamma_par: float = 1.0

    def with_(self, **changes):
        """Copy with some fields replaced, re-validated."""
        return validate(replace(self, **changes))


class Regime(enum.Enum):
    SUPERRADIANT = "Superradiant"
    NON_SUPERRADIANT = "NonSuperradiant"


@dataclass(frozen=True)
class DerivedRates:
    n_threshold: float
    gamma_p: float
    sr_ratio: float
    regime: Regime


def _is_number(x):
    return isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)


def validate(params):
    """Check every constraint and return normalized parameters.

    All violations are collected and raised together as a single
    :class:`ParameterError`.  Accepts either :class:`LaserParams` or an
    already validated instance (validation is idempotent).
    """
    if isinstance(params, ValidatedParams):
        rate_scale = params.rate_scale
        units = "gamma_par"
    else:
        rate_scale = None
        units = params.units

    bad = []
    if units not in UNITS:
        bad.append(("UnknownUnits", f"units must be one of {UNITS}, got {units!r}"))

    rates = {}
    for name in ("kappa", "gamma_perp", "gamma_par"):
        value = getattr(params, name)
        if not _is_number(value) or not math.isfinite(value) or value <= 0:
            bad.append(("NonPositiveRate", f"{name} must be a finite rate > 0, got {value!r}"))
        else:
            rates[name] = float(value)
    omega = params.omega_rabi
    if not _is_number(omega) or not math.isfinite(omega) or omega < 0:
        bad.append(("NonPositiveRate", f"omega_rabi must be finite and >= 0, got {omega!r}"))
    pump = params.pump
    if not _is_number(pump) or not math.isfinite(pump) or pump < 0:
        bad.append(("NegativePump", f"pump must be finite and >= 0, got {pump!r}"))
    n0 = params.n_emitters
    if not _is_number(n0) or not math.isfinite(n0) or n0 < 1 or int(n0) != n0:
        bad.append(("ZeroEmitters", f"n_emitters must be a positive integer, got {n0!r}"))
    f = params.coupling_f
    if not _is_number(f) or not (0 < f <= 1):
        bad.append(("CouplingOutOfRange", f"coupling_f must lie in (0, 1], got {f!r}"))
    if bad:
        raise ParameterError(bad)

    gpar = rates["gamma_par"]
    if rate_scale is None:
        rate_scale = gpar if units == "rad_per_s" else 1.0
    return ValidatedParams(
        omega_rabi=float(omega) / gpar,
        kappa=rates["kappa"] / gpar,
        gamma_perp=rates["gamma_perp"] / gpar,
        pump=float(pump),
        n_emitters=int(n0),
        coupling_f=float(f),
        rate_scale=float(rate_scale),
    )


def inverse_threshold(params):
    """1 / N_th = 2 Omega^2 f / (kappa gamma_perp); zero when Omega = 0."""
    return 2.0 * params.omega_rabi ** 2 * params.coupling_f / (params.kappa * params.gamma_perp)


def threshold_inversion(params):
    inv = inverse_threshold(params)
    return math.inf if inv == 0 else 1.0 / inv


def derive_rates(params):
    sr = 2.0 * params.kappa / params.gamma_perp
    return DerivedRates(
        n_threshold=threshold_inversion(params),
        gamma_p=params.gamma_par * (params.pump + 1.0),
        sr_ratio=sr,
        regime=Regime.SUPERRADIANT if sr >= 1 else Regime.NON_SUPERRADIANT,
    )


_JSON_KEYS = {f.name for f in fields(LaserParams)}
_REQUIRED_KEYS = {"omega_rabi", "kappa", "gamma_perp", "pump", "n_emitters", "coupling_f"}


def params_from_mapping(data):
    """Build :class:`LaserParams` from a JSON-like mapping.

    Unknown keys are rejected; ``gamma_par`` defaults to 1 and
    ``units`` to ``"gamma_par"``.
    """
    if not isinstance(data, dict):
        raise ParameterError([("BadDocument", "parameter document must be a JSON object")])
    bad = [("UnknownKey", f"unknown key {k!r}") for k in sorted(set(data) - _JSON_KEYS)]
    bad += [("MissingKey", f"missing key {k!r}") for k in sorted(_REQUIRED_KEYS - set(data))]
    if bad:
        raise ParameterError(bad)
    return LaserParams(**data)


def load_params(path):
    """Read and validate a JSON parameter file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError([("BadDocument", f"{path}: {exc}")]) from None
    return validate(params_from_mapping(data))


def params_to_mapping(params):
    """JSON-ready mapping of validated parameters (gamma_par units)."""
    return {
        "omega_rabi": params.omega_rabi,
        "kappa": params.kappa,
        "gamma_perp": params.gamma_perp,
        "gamma_par": 1.0,
        "pump": params.pump,
        "n_emitters": params.n_emitters,
        "coupling_f": params.coupling_f,
        "units": "gamma_par",
    }
