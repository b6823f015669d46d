"""Oscillator-laser model of superradiant LEDs and lasers below threshold.

Stationary operating points, closed-form field/photon/population
fluctuation spectra, a linear-Langevin spectral-matrix oracle and a
Monte Carlo cross-check.
"""
from .errors import (
    AboveThreshold,
    DivisionByZeroRate,
    GridMismatch,
    IndefiniteDiffusion,
    NoBracket,
    NonConvergentQuadrature,
    NoSignChange,
    NumericalError,
    OLMError,
    ParameterError,
    SegmentTooLong,
    SingularDrift,
    SingularMatrix,
    UnstableStep,
)
from .params import (
    DerivedRates,
    LaserParams,
    Regime,
    ValidatedParams,
    derive_rates,
    load_params,
    threshold_inversion,
    validate,
)
from .steady_state import SteadyState, photon_number_given_population, residual_report, solve_operating_point
from .spectra import (
    FrequencyGrid,
    PopulationVarianceDecomposition,
    Spectrum,
    SpectrumKind,
    default_grid,
    field_population_convolution,
    field_spectrum,
    photon_fluctuation_spectrum,
    population_fluctuation_spectrum,
    population_variance_decomposition,
    sigma_fluctuation_spectrum,
    simplified_population_spectrum,
    spectrum_variance,
)
from .langevin import (
    LinearLangevinSystem,
    SpectralMatrix,
    build_binary_system,
    build_field_system,
    population_spectrum_via_chain,
    simulate_time_domain,
    spectral_matrix,
    welch_spectrum,
)

__version__ = "0.1.0"
