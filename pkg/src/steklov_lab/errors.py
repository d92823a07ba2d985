"""Exception taxonomy shared across the package.

Each class maps to one CLI exit code (see cli.EXIT_CODES), so library code
should raise the most specific type that applies.
"""


class SteklovLabError(Exception):
    """Base class for all package errors."""


class ConfigError(SteklovLabError):
    """Malformed or inconsistent run configuration."""


class InputDomainError(SteklovLabError):
    """An input value lies outside the documented domain (NaN samples, r > 1, ...)."""


class PositivityError(SteklovLabError):
    """A weight that must be strictly positive is not."""


class SymmetryError(SteklovLabError):
    """An operation requiring a symmetry class received a weight without it."""


class ResolutionError(SteklovLabError):
    """The requested computation is under-resolved; retry with larger N or M."""


class DegenerateTrialError(SteklovLabError):
    """A Rayleigh trial function has (numerically) zero weighted boundary norm."""


class SpectrumError(SteklovLabError):
    """An eigensolve failed or returned an unusable spectrum."""


class InvariantViolation(SteklovLabError):
    """A verified mathematical invariant failed at runtime."""


class DependencyError(SteklovLabError):
    """An operation was called before the data it depends on was computed."""


class InfeasibleError(SteklovLabError):
    """A constrained fit (e.g. the ellipsoid scaling problem) has no solution."""
