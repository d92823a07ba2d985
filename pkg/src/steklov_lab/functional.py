"""The two-eigenvalue objective, its subdifferential, and phase logic.

The objective on normalized eigenvalue pairs is

    h(a, b) = (a^{-s} + t b^{-s})^{1/s},    s != 0, t > 0,

evaluated at a = sigma_1 * L and b = sigma_2 * L of a weighted Steklov
spectrum. Both partial derivatives are nonpositive, so pushing either
normalized eigenvalue up can only lower the objective; the boundary density
that realizes the infimum is what the optimizer hunts for.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, SpectrumError
from .steklov import BoundaryWeight, SteklovSpectrum, solve_spectrum
from .trig import QuadratureGrid, TrigSeries, from_grid_values, values_on_grid


@dataclass(frozen=True)
class FunctionalParams:
    s: float
    t: float

    def __post_init__(self):
        if self.s == 0.0 or not np.isfinite(self.s):
            raise InputDomainError(f"s must be nonzero and finite, got {self.s}")
        if not self.t > 0.0:
            raise InputDomainError(f"t must be positive, got {self.t}")


def f_st(params: FunctionalParams, a: float, b: float) -> float:
    """a^{-s} + t b^{-s}, the s-th power of the objective."""
    return a ** (-params.s) + params.t * b ** (-params.s)


def h_value(params: FunctionalParams, sb1: float, sb2: float) -> float:
    if not (sb1 > 0.0 and sb2 > 0.0):
        raise InputDomainError(
            f"normalized eigenvalues must be positive, got ({sb1}, {sb2})")
    return f_st(params, sb1, sb2) ** (1.0 / params.s)


def h_partials(params: FunctionalParams, sb1: float, sb2: float):
    """(d1, d2) = partial derivatives of h; both are <= 0."""
    if not (sb1 > 0.0 and sb2 > 0.0):
        raise InputDomainError(
            f"normalized eigenvalues must be positive, got ({sb1}, {sb2})")
    s, t = params.s, params.t
    u = f_st(params, sb1, sb2)
    prefac = u ** (1.0 / s - 1.0)
    d1 = -prefac * sb1 ** (-s - 1.0)
    d2 = -prefac * t * sb2 ** (-s - 1.0)
    return d1, d2


def mass_fraction_targets(params: FunctionalParams, sb1: float, sb2: float):
    """Predicted weighted-mass fractions of the two eigenspaces at criticality.

    The fractions (sb1^{-s}/f, t sb2^{-s}/f) sum to one identically; the
    immersion module compares measured masses against them.
    """
    f = f_st(params, sb1, sb2)
    return sb1 ** (-params.s) / f, params.t * sb2 ** (-params.s) / f


def evaluate_E(weight: BoundaryWeight, params: FunctionalParams,
               N: int = 64, k_max: int = 8, method: str = "auto"):
    """Objective value at a weight, along with the spectrum it came from."""
    spec = solve_spectrum(weight, N=N, k_max=k_max, method=method)
    return h_value(params, spec.normalized[1], spec.normalized[2]), spec


# ------------------------------------------------------------- subgradient

@dataclass(frozen=True)
class SubgradientDirection:
    """The measure density psi steering the log-weight, and the h-partials."""

    direction: TrigSeries
    d_coeffs: np.ndarray


def _averaged_square(spectrum: SteklovSpectrum, group) -> TrigSeries:
    """Mean of phi_j^2 over a multiplet, as a trigonometric series."""
    deg = max(spectrum.eigen_traces[j].n_modes for j in group)
    grid = QuadratureGrid.for_modes(deg)
    acc = np.zeros(grid.n_points)
    for j in group:
        acc += values_on_grid(spectrum.eigen_traces[j], grid.n_points) ** 2
    return from_grid_values(acc / len(group), 2 * deg)


def subgradient(weight: BoundaryWeight, spectrum: SteklovSpectrum,
                params: FunctionalParams) -> SubgradientDirection:
    """The measure density psi = sum_i d_i sigma_bar_i (1/L - phi_i^2).

    The first-order change of E under a log-density perturbation delta v is
    int psi delta_v w dtheta, so -psi is the steepest-descent direction in
    the weighted pairing. When sigma_2 sits in a multiplet, phi_2^2 is
    replaced by the average over a w-orthonormal basis of the eigenspace,
    which is a convex combination of subdifferential elements.
    """
    if spectrum.sigmas.size < 3:
        raise SpectrumError(
            "subgradient needs at least the first two nonzero eigenvalues")
    L = spectrum.L
    d1, d2 = h_partials(params, spectrum.normalized[1], spectrum.normalized[2])
    groups = spectrum.multiplets()
    by_index = {}
    for g in groups:
        for j in g:
            by_index[j] = g
    sq1 = _averaged_square(spectrum, by_index[1])
    sq2 = _averaged_square(spectrum, by_index[2])
    deg = max(sq1.n_modes, sq2.n_modes)

    def pad(series: TrigSeries) -> np.ndarray:
        a = np.zeros(deg + 1)
        a[:series.n_modes + 1] = series.cos_coeffs
        b = np.zeros(deg)
        b[:series.n_modes] = series.sin_coeffs
        return a, b

    a1, b1 = pad(sq1)
    a2, b2 = pad(sq2)
    c1 = d1 * spectrum.normalized[1]
    c2 = d2 * spectrum.normalized[2]
    a = -(c1 * a1 + c2 * a2)
    b = -(c1 * b1 + c2 * b2)
    a[0] += (c1 + c2) / L
    return SubgradientDirection(direction=TrigSeries(a, b),
                                d_coeffs=np.array([d1, d2]))


# ----------------------------------------------------------- phase logic

class PhaseCall(enum.Enum):
    FLAT_EXCLUDED = "flat_excluded"
    ELONGATED_ELLIPSE_EXCLUDED = "elongated_ellipse_excluded"
    NONPLANAR_FORCED = "nonplanar_forced"
    INCONCLUSIVE = "inconclusive"


def phase_classify(params: FunctionalParams, theta_star: float) -> PhaseCall:
    """Which planar candidates the parameter point (s, t) rules out.

    theta_star is the ellipse spectral-index transition ratio (module
    ellipse estimates it; 3 is the exact value for this family). For s > 0
    a t beyond theta_star^s also beats every ellipse candidate, forcing a
    non-planar minimizer; for s < 0 the elongated ellipse is never optimal
    and t >= 1/(2^{-s} - 1) additionally rules out all round disks.
    """
    if not (1.0 < theta_star <= 4.0):
        raise InputDomainError(f"theta_star must lie in (1, 4], got {theta_star}")
    s, t = params.s, params.t
    if s > 0.0:
        if t > theta_star ** s:
            return PhaseCall.NONPLANAR_FORCED
        if t > 1.0:
            return PhaseCall.FLAT_EXCLUDED
        return PhaseCall.INCONCLUSIVE
    if t >= 1.0 / (2.0 ** (-s) - 1.0):
        return PhaseCall.NONPLANAR_FORCED
    return PhaseCall.ELONGATED_ELLIPSE_EXCLUDED
