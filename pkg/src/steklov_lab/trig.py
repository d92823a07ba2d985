"""Real trigonometric series on the circle, quadrature, and harmonic extension.

Series are stored in the real basis {1, cos k0, sin k0, ...} so that the
parity classes used throughout (reflections across the two axes) are plain
coefficient-sparsity patterns. The angle convention is theta in [0, 2pi),
with x = cos(theta), y = sin(theta) on the unit circle:

    theta -> -theta        is the reflection  (x, y) -> (x, -y)
    theta -> pi - theta    is the reflection  (x, y) -> (-x, y)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InputDomainError, PositivityError

TWO_PI = 2.0 * np.pi

PARITY_TOL = 1e-12


class Parity(enum.Enum):
    NONE = "none"
    EVEN_X = "even_x"
    EVEN_Y = "even_y"
    EVEN_BOTH = "even_both"
    ODD_X_EVEN_Y = "odd_x_even_y"
    EVEN_X_ODD_Y = "even_x_odd_y"


def _classify_parity(cos_coeffs: np.ndarray, sin_coeffs: np.ndarray) -> Parity:
    """Detect the sparsity pattern of the coefficients within PARITY_TOL."""
    scale = max(1.0, float(np.max(np.abs(cos_coeffs))),
                float(np.max(np.abs(sin_coeffs))) if sin_coeffs.size else 0.0)
    tol = PARITY_TOL * scale
    a = cos_coeffs
    b = sin_coeffs
    ks_a = np.arange(a.size)          # harmonic index of each cos coefficient
    ks_b = np.arange(1, b.size + 1)
    cos_even = np.all(np.abs(a[ks_a % 2 == 1]) <= tol)
    cos_odd = np.all(np.abs(a[(ks_a % 2 == 0)]) <= tol)   # includes a_0
    sin_none = np.all(np.abs(b) <= tol)
    sin_even = np.all(np.abs(b[ks_b % 2 == 1]) <= tol)
    sin_odd = np.all(np.abs(b[ks_b % 2 == 0]) <= tol)

    if sin_none and cos_even:
        return Parity.EVEN_BOTH
    if sin_none and cos_odd:
        return Parity.ODD_X_EVEN_Y
    if cos_odd and cos_even and sin_odd:   # pure sin(odd k)
        return Parity.EVEN_X_ODD_Y
    if sin_none:
        return Parity.EVEN_Y
    if cos_even and sin_odd:
        return Parity.EVEN_X
    return Parity.NONE


@dataclass(frozen=True)
class TrigSeries:
    """Degree-N real trigonometric polynomial.

    cos_coeffs holds a_0..a_N, sin_coeffs holds b_1..b_N (length N).
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    parity: Parity = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.cos_coeffs, dtype=float))
        b = np.atleast_1d(np.asarray(self.sin_coeffs, dtype=float)) \
            if np.asarray(self.sin_coeffs).size else np.zeros(0)
        if b.size != a.size - 1:
            raise InputDomainError(
                f"sin_coeffs must have length n_modes = {a.size - 1}, got {b.size}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InputDomainError("non-finite series coefficient")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)
        if self.parity is None:
            object.__setattr__(self, "parity", _classify_parity(a, b))

    @property
    def n_modes(self) -> int:
        return self.cos_coeffs.size - 1

    @classmethod
    def constant(cls, value: float) -> "TrigSeries":
        return cls(np.array([float(value)]), np.zeros(0))

    @classmethod
    def from_cos(cls, cos_coeffs) -> "TrigSeries":
        a = np.atleast_1d(np.asarray(cos_coeffs, dtype=float))
        return cls(a, np.zeros(a.size - 1))

    def integral(self) -> float:
        """Integral over [0, 2pi)."""
        return TWO_PI * float(self.cos_coeffs[0])

    def __call__(self, theta):
        return evaluate(self, theta)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform grid theta_j = 2 pi j / n_points with equal weights.

    n_points is a power of two at least 4N+4 so that products of two
    degree-N series against a degree-2N weight integrate exactly.
    """

    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 4 or (n & (n - 1)) != 0:
            raise InputDomainError(f"n_points must be a power of two >= 4, got {n}")

    @classmethod
    def for_modes(cls, n_modes: int) -> "QuadratureGrid":
        need = 4 * n_modes + 4
        return cls(1 << int(np.ceil(np.log2(need))))

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_points) / self.n_points

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n_points, TWO_PI / self.n_points)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.mean(values)) * TWO_PI


def project(sample_fn, n_modes: int) -> TrigSeries:
    """Project a boundary function onto the degree-N trigonometric space.

    The function is sampled on QuadratureGrid.for_modes(N) and transformed
    with the FFT; parity is auto-detected from the resulting coefficients.
    """
    grid = QuadratureGrid.for_modes(n_modes)
    vals = np.asarray(sample_fn(grid.angles), dtype=float)
    if vals.shape != (grid.n_points,):
        vals = np.array([sample_fn(t) for t in grid.angles], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise InputDomainError("sample function returned a non-finite value")
    spec = np.fft.rfft(vals) / grid.n_points
    a = np.zeros(n_modes + 1)
    b = np.zeros(n_modes)
    a[0] = spec[0].real
    a[1:] = 2.0 * spec[1:n_modes + 1].real
    b[:] = -2.0 * spec[1:n_modes + 1].imag
    return TrigSeries(a, b)


def from_grid_values(values: np.ndarray, n_modes: int) -> TrigSeries:
    """Like project, but for values already sampled on a uniform 2^k grid."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n & (n - 1):
        raise InputDomainError("grid length must be a power of two")
    if not np.all(np.isfinite(values)):
        raise InputDomainError("non-finite grid value")
    spec = np.fft.rfft(values) / n
    kmax = min(n_modes, n // 2 - 1)
    a = np.zeros(n_modes + 1)
    b = np.zeros(n_modes)
    a[0] = spec[0].real
    a[1:kmax + 1] = 2.0 * spec[1:kmax + 1].real
    b[:kmax] = -2.0 * spec[1:kmax + 1].imag
    return TrigSeries(a, b)


def evaluate(series: TrigSeries, theta):
    """Pointwise value a_0 + sum_k a_k cos(k theta) + b_k sin(k theta)."""
    th = np.asarray(theta, dtype=float)
    ks = np.arange(1, series.n_modes + 1)
    ang = np.multiply.outer(th, ks)
    out = (series.cos_coeffs[0]
           + np.cos(ang) @ series.cos_coeffs[1:]
           + np.sin(ang) @ series.sin_coeffs)
    return out if th.ndim else float(out)


def values_on_grid(series: TrigSeries, n_points: int) -> np.ndarray:
    """Evaluate on the uniform n_points grid via the inverse FFT."""
    if n_points < 2 * (series.n_modes + 1):
        raise InputDomainError("grid too small for the series degree")
    spec = np.zeros(n_points // 2 + 1, dtype=complex)
    spec[0] = n_points * series.cos_coeffs[0]
    n = series.n_modes
    if n:
        spec[1:n + 1] = (n_points / 2.0) * (series.cos_coeffs[1:] - 1j * series.sin_coeffs)
    return np.fft.irfft(spec, n=n_points)


def rotate(series: TrigSeries, alpha: float) -> TrigSeries:
    """Series of theta -> series(theta - alpha) (rotation by alpha)."""
    ks = np.arange(1, series.n_modes + 1)
    c, s = np.cos(ks * alpha), np.sin(ks * alpha)
    a, b = series.cos_coeffs[1:], series.sin_coeffs
    out_a = np.concatenate(([series.cos_coeffs[0]], a * c - b * s))
    out_b = a * s + b * c
    return TrigSeries(out_a, out_b)


def harmonic_extension(boundary: TrigSeries, r: float, theta: float):
    """Value and derivatives of the harmonic extension at (r, theta).

    Returns (value, d/dr, (1/r) d/dtheta, d/dx, d/dy). All five come from
    term-wise differentiation of a_0 + sum r^k (a_k cos + b_k sin); the polar
    pair is assembled into the Cartesian gradient. At r = 0 only the k = 1
    terms contribute to the gradient (r^{k-1} -> 0^0 = 1 handles k = 1).
    """
    if not (0.0 <= r <= 1.0):
        raise InputDomainError(f"r must lie in [0, 1], got {r}")
    n = boundary.n_modes
    ks = np.arange(1, n + 1)
    ck = np.cos(ks * theta)
    sk = np.sin(ks * theta)
    a, b = boundary.cos_coeffs[1:], boundary.sin_coeffs
    rk = r ** ks
    rk1 = r ** (ks - 1)          # 0**0 == 1.0 covers the k = 1 term at r = 0
    value = boundary.cos_coeffs[0] + np.sum(rk * (a * ck + b * sk))
    d_r = np.sum(ks * rk1 * (a * ck + b * sk))
    d_t = np.sum(ks * rk1 * (-a * sk + b * ck))   # (1/r) d/dtheta
    d_x = np.cos(theta) * d_r - np.sin(theta) * d_t
    d_y = np.sin(theta) * d_r + np.cos(theta) * d_t
    return float(value), float(d_r), float(d_t), float(d_x), float(d_y)


def dirichlet_energy(boundary: TrigSeries) -> float:
    """Dirichlet energy of the harmonic extension: pi sum k (a_k^2 + b_k^2)."""
    ks = np.arange(1, boundary.n_modes + 1)
    return float(np.pi * np.sum(ks * (boundary.cos_coeffs[1:] ** 2
                                      + boundary.sin_coeffs ** 2)))


def weight_integral_tables(weight: TrigSeries, degree: int):
    """Tables Ic[m] = int w cos(m theta) dtheta and Is[m] = int w sin(m theta).

    Exact consequences of the stored coefficients; entries beyond the weight
    degree are zero. These are the building blocks of every mass matrix.
    """
    Ic = np.zeros(degree + 1)
    Is = np.zeros(degree + 1)
    Ic[0] = TWO_PI * weight.cos_coeffs[0]
    m = min(degree, weight.n_modes)
    if m:
        Ic[1:m + 1] = np.pi * weight.cos_coeffs[1:m + 1]
        Is[1:m + 1] = np.pi * weight.sin_coeffs[:m]
    return Ic, Is


def check_positive(weight: TrigSeries, label: str = "weight") -> float:
    """Return min over the canonical grid, raising if not strictly positive."""
    grid = QuadratureGrid.for_modes(max(weight.n_modes, 1))
    wmin = float(np.min(values_on_grid(weight, grid.n_points)))
    if not wmin > 0.0:
        raise PositivityError(f"{label} is not strictly positive (min {wmin:.3e})")
    return wmin


def mass_matrix(weight: TrigSeries, n_modes: int) -> np.ndarray:
    """Gram matrix B_{mn} = int e_m e_n w dtheta over {1, cos k, sin k}_{k<=N}.

    Assembled from the integral tables, which is equivalent to exact-degree
    quadrature (products of basis elements have degree <= 2N).
    """
    check_positive(weight)
    N = int(n_modes)
    Ic, Is = weight_integral_tables(weight, 2 * N)
    size = 2 * N + 1
    B = np.empty((size, size))
    ks = np.arange(1, N + 1)
    B[0, 0] = Ic[0]
    B[0, 1::2] = B[1::2, 0] = Ic[ks]
    B[0, 2::2] = B[2::2, 0] = Is[ks]
    diff = np.abs(ks[:, None] - ks[None, :])
    summ = ks[:, None] + ks[None, :]
    B[1::2, 1::2] = 0.5 * (Ic[diff] + Ic[summ])
    B[2::2, 2::2] = 0.5 * (Ic[diff] - Ic[summ])
    # cos(m) against sin(n): 1/2 (Is[m+n] + sign(n-m) Is[|n-m|])
    cross = 0.5 * (Is[summ] + np.sign(ks[None, :] - ks[:, None]) * Is[diff])
    B[1::2, 2::2] = cross
    B[2::2, 1::2] = cross.T
    return B
