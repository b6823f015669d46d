"""Linear Langevin systems: exact stationary spectra and Monte Carlo.

A system is ``dx/dt = A x + F`` with ``<F_k(t) F_l(t')> = 2D_kl delta(t - t')``.
Its stationary spectral matrix is

    S(omega) = (A + i omega I)^-1 (2D) (A^T - i omega I)^-1,

with ``S_ij(omega)`` the spectrum of ``<x_i(omega) x_j(-omega)>``.  This
is computed by batched dense solves and serves as the oracle for the
closed forms in :mod:`oscillator_laser.spectra`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from . import numerics
from .errors import AboveThreshold, IndefiniteDiffusion, SegmentTooLong, SingularDrift, UnstableStep
from .params import THRESHOLD_MARGIN, derive_rates, inverse_threshold
from .spectra import FrequencyGrid, Spectrum, SpectrumKind, _coerce_grid, pump_decay_diffusion

# burn-in, in units of the slowest decay time
BURN_IN_DECAY_TIMES = 10.0
MAX_STEP_STIFFNESS = 0.1


@dataclass(frozen=True)
class LinearLangevinSystem:
    """Drift matrix, diffusion matrix ``2D`` and component labels.

    ``operator_ordered`` marks diffusion matrices of non-commuting
    variables (e.g. ``a`` and ``a+``) whose ``2D`` need not be
    symmetric.  Those systems have spectral matrices but cannot be
    simulated as classical noise.
    """

    drift: np.ndarray
    diffusion: np.ndarray
    labels: tuple
    operator_ordered: bool = False

    def __post_init__(self):
        a = np.asarray(self.drift)
        d = np.asarray(self.diffusion)
        n = a.shape[0]
        if a.shape != (n, n) or d.shape != (n, n) or len(self.labels) != n:
            raise ValueError(f"inconsistent shapes: drift {a.shape}, diffusion {d.shape}, {len(self.labels)} labels")
        if not self.operator_ordered:
            tol = 1e-12 * max(1.0, float(np.abs(d).max(initial=0.0)))
            if not np.allclose(d, d.T, rtol=0, atol=tol):
                raise ValueError("diffusion matrix must be symmetric")
        eig = np.linalg.eigvals(a)
        if np.any(eig.real >= 0):
            raise SingularDrift(f"drift is not Hurwitz; eigenvalues {np.array2string(eig, precision=4)}")
        object.__setattr__(self, "drift", a)
        object.__setattr__(self, "diffusion", d)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self):
        return self.drift.shape[0]

    @property
    def eigenvalues(self):
        return np.linalg.eigvals(self.drift)

    def index(self, label):
        return self.labels.index(label)


@dataclass(frozen=True)
class SpectralMatrix:
    omega: np.ndarray
    values: np.ndarray  # shape (len(omega), n, n)
    labels: tuple

    def entry(self, row, col):
        i = row if isinstance(row, int) else self.labels.index(row)
        j = col if isinstance(col, int) else self.labels.index(col)
        return self.values[:, i, j]


def spectral_matrix(system, omega):
    """Stationary spectral matrix on an array of frequencies."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    n = system.dim
    eye = np.eye(n)
    a = system.drift
    left = a[None] + 1j * w[:, None, None] * eye
    right = a.T[None] - 1j * w[:, None, None] * eye
    # (A + iwI)^-1 2D (A^T - iwI)^-1 = X Y^-1 with X = (A + iwI)^-1 2D;
    # transpose so both factors come from left solves
    x = numerics.solve_dense(left, np.broadcast_to(system.diffusion, (w.size, n, n)).astype(complex))
    s_t = numerics.solve_dense(np.swapaxes(right, -1, -2), np.swapaxes(x, -1, -2))
    return SpectralMatrix(w, np.swapaxes(s_t, -1, -2), system.labels)


def _check_state_below_threshold(state, params):
    inv = inverse_threshold(params)
    if state.inversion * inv >= 1 - THRESHOLD_MARGIN:
        raise AboveThreshold(f"inversion {state.inversion:.6g} is not below threshold")


def field_drift(state, params):
    """Drift of the zero-order field/polarization amplitudes (a, a+, v, v+)."""
    k, g, om, f = params.kappa, params.gamma_perp, params.omega_rabi, params.coupling_f
    gain = om * f * state.inversion
    return np.array([
        [-k, 0, om, 0],
        [0, -k, 0, om],
        [gain, 0, -0.5 * g, 0],
        [0, gain, 0, -0.5 * g],
    ], dtype=float)


def build_field_system(state, params):
    """Four-component field/polarization system in (a, a+, v, v+).

    The (a+, a) entry of its spectral matrix is the field spectrum.
    """
    _check_state_below_threshold(state, params)
    g, f = params.gamma_perp, params.coupling_f
    diff = np.zeros((4, 4))
    diff[0, 1] = 2 * params.kappa
    diff[2, 3] = g * f * state.n_g
    diff[3, 2] = g * f * state.n_e
    return LinearLangevinSystem(field_drift(state, params), diff, ("a", "a+", "v", "v+"), operator_ordered=True)


def binary_drift(state, params):
    k, g, om, f = params.kappa, params.gamma_perp, params.omega_rabi, params.coupling_f
    return np.array([
        [-2 * k, om, 0],
        [2 * om * f * state.inversion, -(k + 0.5 * g), 2 * om * f],
        [0, om * state.inversion, -g],
    ], dtype=float)


def binary_diffusion(state, params, ger=False):
    """Diffusion ``2D`` of (dn, dSigma, dD).

    ``ger=True`` drops the ``2 Ne Ng`` contribution to the D-D entry,
    the value a generalized-Einstein-relation treatment would give.
    """
    k, g, f, n0 = params.kappa, params.gamma_perp, params.coupling_f, params.n_emitters
    n, ne, ng, sig, d = state.n, state.n_e, state.n_g, state.sigma, state.dipole_d
    nn = 2 * k * n
    ss = f * (2 * k * d + g * n0 * n + (2 * k + g) * ne)
    dd = g * (n0 * d + (0.0 if ger else 2 * ne * ng))
    sn = k * sig
    sd = 0.5 * g * n0 * sig
    return np.array([
        [nn, sn, 0.0],
        [sn, ss, sd],
        [0.0, sd, dd],
    ])


def build_binary_system(state, params, ger=False):
    """Three-component system of photon-number, Sigma and D fluctuations."""
    _check_state_below_threshold(state, params)
    return LinearLangevinSystem(binary_drift(state, params), binary_diffusion(state, params, ger=ger), ("n", "sigma", "d"))


def photon_spectrum_via_matrix(state, params, omega, ger=False):
    sm = spectral_matrix(build_binary_system(state, params, ger=ger), omega)
    return sm.entry("n", "n").real


def population_spectrum_via_chain(state, params, grid):
    """Population spectrum from the Sigma entry of the binary spectral matrix."""
    grid = _coerce_grid(grid)
    system = build_binary_system(state, params)
    gp = derive_rates(params).gamma_p
    d_pop = pump_decay_diffusion(state, params)

    def evaluate(w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        s_sigma = spectral_matrix(system, w).entry("sigma", "sigma").real
        return (params.omega_rabi ** 2 * s_sigma + d_pop) / (w * w + gp * gp)

    return Spectrum(grid, evaluate(grid.points), SpectrumKind.POPULATION_FLUCT, state, params, evaluate=evaluate)


# -- time domain ------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Recorded stationary samples, shape ``(n_trajectories, n_samples, n_channels)``."""

    samples: np.ndarray
    sample_interval: float
    labels: tuple
    seed: int
    burn_in_steps: int

    @property
    def n_trajectories(self):
        return self.samples.shape[0]

    def channel(self, label):
        return self.samples[:, :, self.labels.index(label)]


def slowest_decay_rate(system):
    return float(np.min(np.abs(system.eigenvalues.real)))


def simulate_time_domain(system, dt, n_steps, n_trajectories, seed, record_every=1, channels=None,
                         burn_in=None, chunk=2048):
    """Euler-Maruyama ensemble of ``dx = A x dt + L dW`` with ``L L^T = 2D``.

    Every trajectory starts at zero, runs ``burn_in`` steps (default ten
    slowest decay times) and then ``n_steps`` recorded steps.  Trajectory
    ``k`` draws its noise from its own stream spawned from ``seed``, so
    results do not depend on how many trajectories run together.

    Raises
    ------
    UnstableStep
        If ``dt * max|lambda| > 0.1``.
    IndefiniteDiffusion
        If ``2D`` has an eigenvalue below ``-1e-10`` (relative).
    """
    if system.operator_ordered:
        raise ValueError("operator-ordered systems have no classical noise realization")
    eig = system.eigenvalues
    stiffness = dt * float(np.max(np.abs(eig)))
    if stiffness > MAX_STEP_STIFFNESS:
        raise UnstableStep(f"dt * max|lambda| = {stiffness:.3g} exceeds {MAX_STEP_STIFFNESS}")
    fac = numerics.factor_symmetric(system.diffusion, tol=1e-10)
    if fac.indefinite:
        raise IndefiniteDiffusion(
            f"diffusion matrix is indefinite (smallest eigenvalue {fac.min_eigenvalue:.6g})", fac.eigenvalues)

    if burn_in is None:
        burn_in = int(math.ceil(BURN_IN_DECAY_TIMES / slowest_decay_rate(system) / dt))
    if channels is None:
        channels = system.labels
    idx = [system.index(c) for c in channels]
    n = system.dim
    m = int(n_trajectories)
    record_every = int(record_every)
    n_rec = n_steps // record_every

    # x_{k+1} = x_k + dt A x_k + sqrt(dt) L xi
    step = np.eye(n) + dt * system.drift
    noise = math.sqrt(dt) * fac.factor  # (n, rank)
    rank = fac.rank
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(m)]

    x = np.zeros((m, n))
    out = np.empty((m, n_rec, len(idx)))
    total = burn_in + n_rec * record_every
    done = 0
    while done < total:
        todo = min(chunk, total - done)
        if rank:
            xi = np.stack([rng.standard_normal((todo, rank)) for rng in streams], axis=1)
            kicks = xi @ noise.T  # (todo, m, n)
        else:
            kicks = np.zeros((todo, m, n))
        for t in range(todo):
            x = x @ step.T + kicks[t]
            k = done + t + 1 - burn_in
            if k > 0 and k % record_every == 0:
                out[:, k // record_every - 1] = x[:, idx]
        done += todo
    return TrajectoryEnsemble(out, dt * record_every, tuple(channels), seed, burn_in)


def welch_spectrum(ensemble, segment_length, overlap=0.5, channel=None):
    """Hann-windowed averaged periodogram with per-bin standard errors.

    Normalized as a two-sided density in omega, so that the variance is
    ``(2 pi)^-1`` times the integral over the whole line; for an
    Ornstein-Uhlenbeck process this reproduces ``c / (omega^2 + gamma^2)``.
    Returns the non-negative frequencies only.  The standard error is the
    spread of per-trajectory spectra over ``sqrt(n_trajectories)``.
    """
    label = ensemble.labels[0] if channel is None else channel
    data = ensemble.channel(label)
    n_samples = data.shape[1]
    segment_length = int(segment_length)
    if segment_length > n_samples:
        raise SegmentTooLong(f"segment of {segment_length} samples exceeds record of {n_samples}")
    if segment_length < 2:
        raise ValueError("segment_length must be at least 2")
    fs = 1.0 / ensemble.sample_interval
    freqs, psd = signal.welch(data, fs=fs, window="hann", nperseg=segment_length,
                              noverlap=int(overlap * segment_length), detrend=False,
                              return_onesided=True, scaling="density", axis=-1)
    # one-sided to two-sided: halve everything except DC (and Nyquist for even lengths)
    psd = 0.5 * psd
    psd[:, 0] *= 2
    if segment_length % 2 == 0:
        psd[:, -1] *= 2
    values = psd.mean(axis=0)
    m = psd.shape[0]
    stderr = psd.std(axis=0, ddof=1) / math.sqrt(m) if m > 1 else np.full_like(values, np.inf)
    grid = FrequencyGrid(2 * np.pi * freqs)
    return Spectrum(grid, values, SpectrumKind.SIMULATED, stderr=stderr)
