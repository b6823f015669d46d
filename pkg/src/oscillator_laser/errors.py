"""Exception hierarchy.

Two families: :class:`ParameterError` for bad inputs (CLI exit status 1)
and :class:`NumericalError` for failures inside a computation (exit
status 2).
"""
from __future__ import annotations


class OLMError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(OLMError, ValueError):
    """Invalid laser parameters or user input.

    ``violations`` lists ``(code, message)`` pairs, one per broken
    constraint, so a single call reports everything that is wrong.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        text = "; ".join(f"{code}: {msg}" for code, msg in self.violations)
        super().__init__(text or "invalid parameters")

    @property
    def codes(self):
        return [code for code, _ in self.violations]


class NumericalError(OLMError, ArithmeticError):
    pass


class AboveThreshold(NumericalError):
    """Inversion at or above the threshold of the linear field system."""


class NoBracket(NumericalError):
    pass


class NoSignChange(NumericalError):
    pass


class NonConvergentQuadrature(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class SingularDrift(NumericalError):
    """Drift matrix has an eigenvalue with non-negative real part."""


class IndefiniteDiffusion(NumericalError):
    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class UnstableStep(NumericalError):
    pass


class SegmentTooLong(NumericalError):
    pass


class GridMismatch(NumericalError):
    pass


class DivisionByZeroRate(NumericalError):
    pass
