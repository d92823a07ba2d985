"""Ellipse spectra through a conformal pullback to the disk.

The ellipse {p x^2 + y^2 = 1} carries a weighted Steklov problem whose
coordinate functions are eigenfunctions with eigenvalues p and 1. Rather
than discretize the ellipse directly, an odd real power series f(z) =
sum c_n z^(2n+1) mapping the disk onto the ellipse interior is solved for
by Gauss-Newton collocation of the boundary equation, and the problem is
pulled back to the disk as the density |f'| (p^2 X^2 + Y^2)^(-1/2). The
disk solver then produces the full spectrum, in which the positions k1, k2
of the coordinate eigenvalues are located by value and by eigenfunction
correlation. Bisection on the axis ratio finds where the second coordinate
eigenvalue stops being second, the threshold that controls when elongated
ellipses are excluded as minimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (DependencyError, InputDomainError, InvariantViolation,
                     ResolutionError)
from .steklov import BoundaryWeight, SteklovSpectrum, solve_spectrum_blocks
from .trig import TrigSeries, evaluate, from_grid_values

TWO_PI = 2.0 * np.pi

MAP_RESIDUAL_TOL = 1e-8


# ------------------------------------------------------------ conformal map

def _map_modes(p: float) -> int:
    """Odd-mode count needed for a 1e-8 boundary fit, by resolution study."""
    for floor, M in ((0.45, 48), (0.28, 96), (0.22, 192),
                     (0.16, 384), (0.12, 768)):
        if p >= floor:
            return M
    return 2048


def _boundary_xy(c: np.ndarray, P: int):
    """X, Y of f(e^{i theta}) on the uniform P-grid via one inverse FFT."""
    ks = 2 * np.arange(c.size) + 1
    spec = np.zeros(P, dtype=complex)
    spec[ks] = c
    f = np.fft.ifft(spec) * P
    return f.real, f.imag


def _cos_sin_tables(vals: np.ndarray, deg: int):
    """Ic[m] = int vals cos(m th) dth, Is[m] = int vals sin(m th) dth."""
    P = vals.size
    F = np.fft.rfft(vals) / P
    top = min(deg, P // 2)
    Ic = np.zeros(deg + 1)
    Is = np.zeros(deg + 1)
    Ic[0] = TWO_PI * F[0].real
    Ic[1:top + 1] = TWO_PI * F[1:top + 1].real
    Is[1:top + 1] = -TWO_PI * F[1:top + 1].imag
    return Ic, Is


def _gauss_newton(p: float, M: int, c0: np.ndarray | None,
                  tol: float = 1e-13, itmax: int = 60):
    """Minimize the boundary defect p X^2 + Y^2 - 1 over odd coefficients.

    The normal matrix J^T J is assembled in O(M^2) from cosine/sine integral
    tables of the quadratic fields 4 p^2 X^2, 4 Y^2, 4 p X Y, so one
    iteration costs a Cholesky solve plus a handful of FFTs.
    """
    ks = 2 * np.arange(M) + 1
    kmax = int(ks[-1])
    P = 1 << int(np.ceil(np.log2(8 * kmax + 8)))
    c = np.zeros(M)
    if c0 is None:
        a, b = 1.0 / math.sqrt(p), 1.0
        c[0] = 0.5 * (a + b)
        if M > 1:
            c[1] = 0.5 * (a - b)
    else:
        top = min(M, c0.size)
        c[:top] = c0[:top]

    D = np.abs(ks[:, None] - ks[None, :])
    Ssum = ks[:, None] + ks[None, :]
    sgn = np.sign(ks[None, :] - ks[:, None])
    for _ in range(itmax):
        X, Y = _boundary_xy(c, P)
        r = p * X * X + Y * Y - 1.0
        Icu, _ = _cos_sin_tables(4.0 * p * p * X * X, 2 * kmax)
        Icv, _ = _cos_sin_tables(4.0 * Y * Y, 2 * kmax)
        _, Iss = _cos_sin_tables(4.0 * p * X * Y, 2 * kmax)
        Gcc = 0.5 * (Icu[D] + Icu[Ssum])
        Gss = 0.5 * (Icv[D] - Icv[Ssum])
        Gcs = 0.5 * (Iss[Ssum] + sgn * Iss[D])
        G = Gcc + Gss + Gcs + Gcs.T
        Icr, _ = _cos_sin_tables(2.0 * p * X * r, kmax)
        _, Isr = _cos_sin_tables(2.0 * Y * r, kmax)
        g = Icr[ks] + Isr[ks]
        try:
            cf = sla.cho_factor(G + (1e-14 * G.diagonal().max()) * np.eye(M))
            dc = -sla.cho_solve(cf, g)
        except np.linalg.LinAlgError:
            dc = -np.linalg.lstsq(G, g, rcond=None)[0]
        nr0 = np.linalg.norm(r)
        lam = 1.0
        for _ in range(40):
            Xt, Yt = _boundary_xy(c + lam * dc, P)
            if np.linalg.norm(p * Xt * Xt + Yt * Yt - 1.0) < nr0:
                break
            lam *= 0.5
        c = c + lam * dc
        if np.linalg.norm(lam * dc) < tol * max(1.0, np.linalg.norm(c)):
            break
    X, Y = _boundary_xy(c, P)
    residual = float(np.max(np.abs(p * X * X + Y * Y - 1.0)))
    return c, residual


@dataclass(frozen=True)
class EllipseProblem:
    """Converged odd power-series map from the disk onto one ellipse."""

    p: float
    map_coeffs: np.ndarray    # c_n multiplies z^(2n+1); all real
    map_degree: int
    fit_residual: float

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise InvariantViolation(f"p = {self.p} outside (0, 1]")
        if self.map_degree != self.map_coeffs.size:
            raise InvariantViolation("map_degree disagrees with coefficients")
        if not (np.all(np.isfinite(self.map_coeffs))
                and self.fit_residual >= 0.0):
            raise InvariantViolation("non-finite map data")

    def coordinate_traces(self):
        """Boundary traces of Re f and Im f as trigonometric series."""
        ks = 2 * np.arange(self.map_coeffs.size) + 1
        deg = int(ks[-1])
        cos = np.zeros(deg + 1)
        sin = np.zeros(deg)
        cos[ks] = self.map_coeffs
        sin[ks - 1] = self.map_coeffs
        return TrigSeries.from_cos(cos), TrigSeries(np.zeros(deg + 1), sin)

    def derivative_values(self, P: int) -> np.ndarray:
        """Complex f'(e^{i theta}) on the uniform P-grid."""
        ks = 2 * np.arange(self.map_coeffs.size) + 1
        spec = np.zeros(P, dtype=complex)
        spec[ks - 1] = ks * self.map_coeffs
        return np.fft.ifft(spec) * P


def conformal_map(p: float, M: int | None = None) -> EllipseProblem:
    """Solve for the disk-to-ellipse map by continuation from the circle.

    The axis ratio is walked down geometrically from 1 so each Gauss-Newton
    solve starts near its solution; M defaults to a per-p resolution table
    and an explicit M must be at least 16.
    """
    if not (0.0 < p <= 1.0) or not math.isfinite(p):
        raise InputDomainError(f"ellipse parameter p = {p} outside (0, 1]")
    if M is not None and M < 16:
        raise InputDomainError("map needs at least 16 odd modes")
    steps = []
    pk = 1.0
    while pk > p * 1.0001:
        pk = max(p, pk * 0.8)
        steps.append(pk)
    if not steps:
        steps = [p]
    c = None
    residual = np.inf
    for pk in steps:
        Mk = M if M is not None else _map_modes(pk)
        c, residual = _gauss_newton(pk, Mk, c)
    if M is None:
        # intermediate steps only warm-start; the target p must hit the bar
        while residual > MAP_RESIDUAL_TOL and Mk < 4096:
            Mk = min(2 * Mk, 4096)
            c, residual = _gauss_newton(p, Mk, c)
    if residual > MAP_RESIDUAL_TOL:
        raise ResolutionError(
            f"conformal map stalled at residual {residual:.3e} for p = {p}; "
            "a larger M may converge")
    ks = 2 * np.arange(c.size) + 1
    P = 1 << int(np.ceil(np.log2(8 * ks[-1] + 8)))
    dmin = float(np.min(np.abs(
        np.fft.ifft(np.bincount(ks - 1, ks * c, P).astype(complex)) * P)))
    if dmin <= 0.0:
        raise InvariantViolation("map derivative vanishes on the boundary")
    return EllipseProblem(p=float(p), map_coeffs=c, map_degree=c.size,
                          fit_residual=residual)


# ----------------------------------------------------------------- pullback

def pullback_weight(problem: EllipseProblem,
                    N: int | None = None) -> BoundaryWeight:
    """Disk density that makes (D, w) isospectral to the weighted ellipse.

    w = |f'| (p^2 X^2 + Y^2)^(-1/2) combines the boundary stretch of the map
    with the ellipse's own conformal factor. The density is analytic, so the
    default degree doubles until the spectral tail falls below 1e-10.
    """
    if problem.fit_residual > MAP_RESIDUAL_TOL:
        raise DependencyError("conformal map residual too large for pullback")
    p = problem.p
    kmax = 2 * problem.map_degree - 1
    adaptive = N is None
    N_try = 128 if adaptive else N
    while True:
        P = 1 << int(np.ceil(np.log2(max(8 * kmax + 8, 8 * N_try + 8, 4096))))
        X, Y = _boundary_xy(problem.map_coeffs, P)
        fp = problem.derivative_values(P)
        w_vals = np.abs(fp) / np.sqrt(p * p * X * X + Y * Y)
        F = np.abs(np.fft.rfft(w_vals)) / P
        tail = float(np.max(F[N_try + 1:], initial=0.0)) / F[0]
        if tail <= 1e-10 or not adaptive or N_try >= 4096:
            break
        N_try *= 2
    if tail > 1e-9:
        raise ResolutionError(
            f"pullback weight needs more than {N_try} modes (tail {tail:.1e})")
    density = from_grid_values(w_vals, N_try)
    total = density.integral()
    expected = TWO_PI / math.sqrt(p)
    if abs(total - expected) > 1e-7 * expected:
        raise InvariantViolation(
            f"pullback length {total} differs from 2 pi / sqrt(p) = {expected}")
    return BoundaryWeight.from_density(density)


# ------------------------------------------------------------------ indices

@dataclass(frozen=True)
class IndexResult:
    """Positions of the two coordinate eigenvalues in the disk spectrum."""

    p: float
    k1: int
    k2: int
    sigma_bar_low: float      # measured sigma_bar at k1; 2 pi sqrt(p) exactly
    sigma_bar_high: float     # measured sigma_bar at k2; 2 pi / sqrt(p)
    map_residual: float

    def __post_init__(self):
        if not (1 <= self.k1 <= self.k2):
            raise InvariantViolation(
                f"index order violated: k1 = {self.k1}, k2 = {self.k2}")


def _match_index(spectrum: SteklovSpectrum, target: float,
                 trace: TrigSeries, rtol: float = 1e-5) -> int:
    """Smallest index whose eigenvalue matches target, correlation-confirmed.

    The index is the rank of the matched value, so a double eigenvalue
    containing the trace reports the first position of its cluster; the
    correlation threshold guards against an accidental value collision with
    an unrelated eigenfunction.
    """
    sig = spectrum.sigmas
    cands = [j for j in range(1, sig.size)
             if abs(sig[j] - target) <= rtol * max(target, 1e-12)]
    if not cands:
        raise ResolutionError(
            f"no eigenvalue within {rtol} of {target}; spectrum too coarse "
            "or k_max too small")
    P = 4096
    th = TWO_PI * np.arange(P) / P
    ref = evaluate(trace, th)
    ref = ref / np.linalg.norm(ref)
    best = 0.0
    for j in cands:
        tv = evaluate(spectrum.eigen_traces[j], th)
        corr = abs(float(tv @ ref)) / np.linalg.norm(tv)
        best = max(best, corr)
    if best < 0.99:
        raise ResolutionError(
            f"eigenvalue near {target} found but its eigenspace does not "
            f"contain the coordinate trace (correlation {best:.3f})")
    return min(cands)


def compute_indices(p: float, N: int = 160) -> IndexResult:
    """Locate the coordinate eigenvalues and their ranks, double-checked.

    The spectrum is solved at N and at 2N; the ranks must agree between the
    two resolutions or the result is not trusted.
    """
    problem = conformal_map(p)
    weight = pullback_weight(problem)
    trace_x, trace_y = problem.coordinate_traces()

    def locate(n: int):
        spec = solve_spectrum_blocks(weight, N=n, k_max=12, method="lapack",
                                     check=False)
        k1 = _match_index(spec, p, trace_x)
        k2 = _match_index(spec, 1.0, trace_y)
        return spec, k1, k2

    spec, k1, k2 = locate(N)
    _, k1b, k2b = locate(2 * N)
    if (k1, k2) != (k1b, k2b):
        raise ResolutionError(
            f"index assignment unstable under refinement: ({k1}, {k2}) at "
            f"N = {N} vs ({k1b}, {k2b}) at N = {2 * N}")
    sbar_low = float(spec.normalized[k1])
    sbar_high = float(spec.normalized[k2])
    for measured, exact in ((sbar_low, TWO_PI * math.sqrt(p)),
                            (sbar_high, TWO_PI / math.sqrt(p))):
        if abs(measured - exact) > 1e-4 * exact:
            raise ResolutionError(
                f"normalized eigenvalue {measured} strays from the closed "
                f"form {exact}")
    return IndexResult(p=float(p), k1=k1, k2=k2, sigma_bar_low=sbar_low,
                       sigma_bar_high=sbar_high,
                       map_residual=problem.fit_residual)


# --------------------------------------------------------------- theta star

@dataclass(frozen=True)
class ThetaStarEstimate:
    """Bracket for the axis ratio where k2 first reaches 3."""

    bracket_lo: float
    bracket_hi: float
    transitions: tuple       # evaluated (ratio, k2) pairs, ascending ratio
    multivalued: bool


def estimate_theta_star(tolerance: float = 0.1, lo: float = 1.05,
                        hi: float = 4.2) -> ThetaStarEstimate:
    """Bisection on the axis ratio 1/p for the k2 = 3 threshold.

    Evaluations are recorded in a transition table; if the table turns out
    non-monotone the conservative (largest) transition is bracketed and the
    estimate flagged, since the threshold's defining scan is then ambiguous.
    """
    if not (0.0 < tolerance <= hi - lo):
        raise InputDomainError("tolerance must be in (0, hi - lo]")
    if not (1.0 < lo < hi <= 4.5):
        raise InputDomainError("scan range must satisfy 1 < lo < hi <= 4.5")
    evals = {}

    def k2_at(ratio: float) -> int:
        if ratio not in evals:
            evals[ratio] = compute_indices(1.0 / ratio).k2
        return evals[ratio]

    if k2_at(lo) >= 3 or k2_at(hi) < 3:
        raise InvariantViolation(
            "scan endpoints do not bracket the k2 = 3 transition")
    a, b = lo, hi
    while b - a > tolerance:
        mid = 0.5 * (a + b)
        if k2_at(mid) >= 3:
            b = mid
        else:
            a = mid
    table = tuple(sorted(evals.items()))
    crossings = [(table[i][0], table[i + 1][0])
                 for i in range(len(table) - 1)
                 if table[i][1] < 3 <= table[i + 1][1]]
    downs = any(table[i][1] >= 3 > table[i + 1][1]
                for i in range(len(table) - 1))
    lo_b, hi_b = crossings[-1] if downs else (a, b)
    return ThetaStarEstimate(bracket_lo=float(lo_b), bracket_hi=float(hi_b),
                             transitions=table, multivalued=downs)


# ---------------------------------------------------------------- reporting

def indices_csv(results: list, path: str) -> str:
    """CSV rows p, k1, k2, sigma_bar_low, sigma_bar_high, map_residual."""
    import csv

    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "k1", "k2", "sigma_bar_low", "sigma_bar_high",
                         "map_residual"])
        for r in results:
            writer.writerow([f"{r.p:.17g}", r.k1, r.k2,
                             f"{r.sigma_bar_low:.17g}",
                             f"{r.sigma_bar_high:.17g}",
                             f"{r.map_residual:.3e}"])
    return path
