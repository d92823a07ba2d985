"""Weighted Steklov eigenproblem on the unit disk.

The Dirichlet-to-Neumann map of the disk is diagonal in the Fourier basis
(the harmonic extension of cos k theta is r^k cos k theta, whose normal
derivative on the circle is k cos k theta), so the Galerkin discretization of

    Delta phi = 0 in D,   d phi / d r = sigma w phi on S^1

in the basis {1, cos k, sin k}_{k<=N} is the generalized symmetric pencil
A u = sigma B u with A = pi * diag(0, 1, 1, 2, 2, ..., N, N) and B the
w-weighted Gram matrix. The only approximation in the whole solve is the
truncation of the weight itself.

For weights even in both axes the pencil decouples into four parity blocks
(cos even, cos odd, sin odd, sin even), which is both a large saving at high
resolution and the structure the symmetry arguments downstream rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import gen_eigh
from .errors import (DegenerateTrialError, InputDomainError,
                     InvariantViolation, ResolutionError, SymmetryError)
from .trig import (Parity, QuadratureGrid, TrigSeries, check_positive,
                   dirichlet_energy, evaluate, from_grid_values, mass_matrix,
                   project, rotate, values_on_grid, weight_integral_tables)

TWO_PI = 2.0 * np.pi

DEGENERACY_RTOL = 1e-7      # eigenvalues within 1e-7*(1+sigma) form a multiplet
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class BoundaryWeight:
    """Positive boundary density w = e^v, optionally with its logarithm."""

    density: TrigSeries
    log_coeffs: TrigSeries | None = None
    symmetry_class: Parity = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        wmin = check_positive(self.density, "boundary weight")
        object.__setattr__(self, "_min_density", wmin)
        if self.symmetry_class is None:
            object.__setattr__(self, "symmetry_class", self.density.parity)
        elif self.symmetry_class is not self.density.parity:
            # a declared class must actually hold; subclasses of the true
            # parity are fine (e.g. declaring even_y for an even_both weight)
            if not _parity_implies(self.density.parity, self.symmetry_class):
                raise SymmetryError(
                    f"declared symmetry {self.symmetry_class} is not satisfied "
                    f"by the density (classified {self.density.parity})")

    @classmethod
    def from_density(cls, density: TrigSeries) -> "BoundaryWeight":
        return cls(density)

    @classmethod
    def from_log(cls, log_series: TrigSeries,
                 n_modes: int | None = None) -> "BoundaryWeight":
        """Weight e^v for a log-density v, projected to degree n_modes.

        e^v is not band-limited; the default degree 4*deg(v)+16 keeps the
        truncation far below solver tolerances for the moderate log-densities
        the optimizer produces.
        """
        if n_modes is None:
            n_modes = 4 * max(log_series.n_modes, 1) + 16
        grid = QuadratureGrid.for_modes(n_modes)
        vals = np.exp(values_on_grid(log_series, grid.n_points))
        density = from_grid_values(vals, n_modes)
        return cls(density, log_coeffs=log_series)

    @property
    def length(self) -> float:
        return self.density.integral()

    @property
    def min_density(self) -> float:
        return self._min_density  # type: ignore[attr-defined]

    def rotated(self, alpha: float) -> "BoundaryWeight":
        log = rotate(self.log_coeffs, alpha) if self.log_coeffs is not None else None
        return BoundaryWeight(rotate(self.density, alpha), log_coeffs=log)


def _parity_implies(actual: Parity, declared: Parity) -> bool:
    """True when a series of parity `actual` also satisfies `declared`."""
    if actual is declared:
        return True
    weaker = {
        Parity.EVEN_BOTH: {Parity.EVEN_X, Parity.EVEN_Y, Parity.NONE},
        Parity.ODD_X_EVEN_Y: {Parity.EVEN_Y, Parity.NONE},
        Parity.EVEN_X_ODD_Y: {Parity.EVEN_X, Parity.NONE},
        Parity.EVEN_X: {Parity.NONE},
        Parity.EVEN_Y: {Parity.NONE},
        Parity.NONE: set(),
    }
    return declared in weaker[actual]


@dataclass(frozen=True)
class SteklovSpectrum:
    """Lowest eigenvalues and boundary traces of a weighted Steklov problem.

    sigmas ascend from the exact sigma_0 = 0; traces are normalized so that
    int phi^2 w dtheta = 1; `normalized` holds sigma_k * L with L = int w.
    """

    sigmas: np.ndarray
    eigen_traces: tuple
    L: float
    normalized: np.ndarray
    multiplicity_gaps: np.ndarray
    weight: BoundaryWeight
    block_labels: tuple | None = None

    def multiplets(self, rtol: float = DEGENERACY_RTOL):
        """Group eigenvalue indices into clusters of near-equal sigmas."""
        groups = [[0]]
        for i in range(1, self.sigmas.size):
            if self.sigmas[i] - self.sigmas[i - 1] <= rtol * (1.0 + abs(self.sigmas[i])):
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def check_invariants(self):
        """Raise InvariantViolation if a structural or Weinstock bound fails."""
        s = self.sigmas
        if abs(s[0]) > 1e-10 * (1.0 + abs(s[1]) if s.size > 1 else 1.0):
            raise InvariantViolation(f"sigma_0 = {s[0]:.3e} is not zero")
        if s.size > 1 and s[1] <= 1e-10:
            raise InvariantViolation("sigma_0 is not simple")
        if np.any(np.diff(s) < -1e-12):
            raise InvariantViolation("eigenvalues not ascending")
        nb = self.normalized
        if nb.size > 1 and nb[1] > TWO_PI * (1.0 + 1e-6):
            raise InvariantViolation(
                f"normalized sigma_1 = {nb[1]:.8f} exceeds the 2 pi bound")
        if nb.size > 2:
            if nb[2] > 2.0 * TWO_PI * (1.0 + 1e-6):
                raise InvariantViolation(
                    f"normalized sigma_2 = {nb[2]:.8f} exceeds the 4 pi bound")
            if 1.0 / nb[1] + 1.0 / nb[2] < 1.0 / np.pi - 1e-8:
                raise InvariantViolation(
                    "reciprocal sum bound violated: "
                    f"1/{nb[1]:.6f} + 1/{nb[2]:.6f} < 1/pi")

    def orthonormality_defect(self) -> float:
        """Max deviation of the traces from w-orthonormality."""
        k = len(self.eigen_traces)
        deg = max(t.n_modes for t in self.eigen_traces)
        grid = QuadratureGrid.for_modes(deg + self.weight.density.n_modes)
        th = grid.angles
        w = self.weight.density(th)
        vals = np.stack([values_on_grid(t, grid.n_points) for t in self.eigen_traces])
        G = (vals * w) @ vals.T * (TWO_PI / grid.n_points)
        return float(np.max(np.abs(G - np.eye(k))))


def _dtn_diag(n_modes: int) -> np.ndarray:
    ks = np.arange(1, n_modes + 1)
    return np.pi * np.concatenate(([0.0], np.repeat(ks.astype(float), 2)))


def _decode_column(u: np.ndarray, n_modes: int) -> TrigSeries:
    a = np.concatenate(([u[0]], u[1::2]))
    b = u[2::2].copy()
    # deterministic sign: first coefficient of significant size positive
    coefs = np.concatenate((a, b))
    idx = np.flatnonzero(np.abs(coefs) > 1e-8 * np.max(np.abs(coefs)))
    if idx.size and coefs[idx[0]] < 0.0:
        a, b = -a, -b
    return TrigSeries(a, b)


def solve_spectrum(weight: BoundaryWeight, N: int, k_max: int = 8,
                   method: str = "auto", check: bool = True,
                   cauchy_check: bool = False,
                   cauchy_tol: float = 1e-9) -> SteklovSpectrum:
    """Lowest k_max+1 Steklov eigenpairs at Fourier truncation N.

    With `cauchy_check` the spectrum is re-solved at 2N and accepted only if
    every eigenvalue moved by less than cauchy_tol*(1+sigma).
    """
    if N < k_max + 4:
        raise InputDomainError(f"need N >= k_max + 4, got N={N}, k_max={k_max}")
    A = np.diag(_dtn_diag(N))
    B = mass_matrix(weight.density, N)
    vals, vecs = gen_eigh(A, B, k_lowest=k_max + 1, method=method)

    if check:
        for j in range(vals.size):
            r = A @ vecs[:, j] - vals[j] * (B @ vecs[:, j])
            bu = B @ vecs[:, j]
            if np.linalg.norm(r) > RESIDUAL_RTOL * np.linalg.norm(bu):
                raise InvariantViolation(
                    f"eigenpair {j} residual {np.linalg.norm(r):.3e} exceeds "
                    f"{RESIDUAL_RTOL:.0e} * |B u|")
    vals = vals.copy()
    if abs(vals[0]) <= 1e-10 * (1.0 + abs(vals[1]) if vals.size > 1 else 1.0):
        vals[0] = 0.0

    if cauchy_check:
        ref = solve_spectrum(weight, 2 * N, k_max=k_max, method=method,
                             check=False, cauchy_check=False)
        drift = np.abs(vals - ref.sigmas)
        bad = drift > cauchy_tol * (1.0 + np.abs(vals))
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise ResolutionError(
                f"sigma_{k} moved by {drift[k]:.3e} between N={N} and N={2 * N}; "
                "increase N")

    traces = tuple(_decode_column(vecs[:, j], N) for j in range(vals.size))
    L = weight.length
    spec = SteklovSpectrum(sigmas=vals, eigen_traces=traces, L=L,
                           normalized=vals * L,
                           multiplicity_gaps=np.diff(vals), weight=weight)
    if check:
        spec.check_invariants()
    return spec


# ------------------------------------------------------------ parity blocks

@dataclass(frozen=True)
class ParityBlock:
    """One decoupled subproblem of an even-in-both-axes weight."""

    label: str           # cos_even | cos_odd | sin_odd | sin_even
    harmonics: np.ndarray
    a_diag: np.ndarray
    b_matrix: np.ndarray


_BLOCK_DEFS = (
    ("cos_even", "cos", 0, 2),
    ("cos_odd", "cos", 1, 2),
    ("sin_odd", "sin", 1, 2),
    ("sin_even", "sin", 2, 2),
)


def parity_blocks(weight: BoundaryWeight, N: int) -> tuple:
    """The four decoupled (A, B) blocks of an even_both weight.

    Bases are {cos 2k}, {cos(2k+1)}, {sin(2k+1)}, {sin 2k} with harmonics up
    to N. The union of the block spectra is the full spectrum.
    """
    if weight.symmetry_class is not Parity.EVEN_BOTH:
        raise SymmetryError(
            "parity blocks require a weight even in both axes, got "
            f"{weight.symmetry_class}")
    Ic, _ = weight_integral_tables(weight.density, 2 * N)
    blocks = []
    for label, kind, start, step in _BLOCK_DEFS:
        ks = np.arange(start, N + 1, step)
        if ks.size == 0:
            continue
        diff = np.abs(ks[:, None] - ks[None, :])
        summ = ks[:, None] + ks[None, :]
        if kind == "cos":
            Bblk = 0.5 * (Ic[diff] + Ic[summ])
        else:
            Bblk = 0.5 * (Ic[diff] - Ic[summ])
        blocks.append(ParityBlock(label=label, harmonics=ks,
                                  a_diag=np.pi * ks.astype(float),
                                  b_matrix=Bblk))
    return tuple(blocks)


def _block_trace(block: ParityBlock, coeffs: np.ndarray, N: int) -> TrigSeries:
    a = np.zeros(N + 1)
    b = np.zeros(N)
    if block.label.startswith("cos"):
        a[block.harmonics] = coeffs
    else:
        b[block.harmonics - 1] = coeffs
    idx = np.flatnonzero(np.abs(coeffs) > 1e-8 * np.max(np.abs(coeffs)))
    if idx.size and coeffs[idx[0]] < 0.0:
        a, b = -a, -b
    return TrigSeries(a, b)


def solve_spectrum_blocks(weight: BoundaryWeight, N: int, k_max: int = 8,
                          method: str = "auto",
                          check: bool = True) -> SteklovSpectrum:
    """Like solve_spectrum but through the four parity blocks.

    Besides the O(N^2)-per-block saving this labels each eigenvalue with the
    parity class of its eigenfunction, which the asymptotic and immersion
    modules key on. Requires an even_both weight.
    """
    if N < k_max + 4:
        raise InputDomainError(f"need N >= k_max + 4, got N={N}, k_max={k_max}")
    per_block = k_max + 1
    entries = []
    for blk in parity_blocks(weight, N):
        take = min(per_block, blk.harmonics.size)
        A = np.diag(blk.a_diag)
        vals, vecs = gen_eigh(A, blk.b_matrix, k_lowest=take, method=method)
        for j in range(vals.size):
            entries.append((float(vals[j]), blk.label,
                            _block_trace(blk, vecs[:, j], N)))
    entries.sort(key=lambda e: e[0])
    entries = entries[:k_max + 1]
    vals = np.array([e[0] for e in entries])
    if abs(vals[0]) <= 1e-10 * (1.0 + abs(vals[1]) if vals.size > 1 else 1.0):
        vals[0] = 0.0
    L = weight.length
    spec = SteklovSpectrum(sigmas=vals,
                           eigen_traces=tuple(e[2] for e in entries),
                           L=L, normalized=vals * L,
                           multiplicity_gaps=np.diff(vals), weight=weight,
                           block_labels=tuple(e[1] for e in entries))
    if check:
        spec.check_invariants()
    return spec


# -------------------------------------------------------- Rayleigh quotient

def _project_shifted(sample_fn, n_modes: int, n_points: int) -> TrigSeries:
    """Projection from midpoint samples theta_j = 2 pi (j + 1/2) / P.

    The half-step shift keeps trial functions with isolated boundary
    singularities (log cusps at grid-aligned angles) finite at every sample.
    """
    th = TWO_PI * (np.arange(n_points) + 0.5) / n_points
    vals = np.asarray(sample_fn(th), dtype=float)
    if vals.shape != th.shape:
        vals = np.array([sample_fn(t) for t in th], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise InputDomainError("trial function not finite at quadrature points")
    spec = np.fft.rfft(vals) / n_points
    ks = np.arange(n_modes + 1)
    spec = spec[:n_modes + 1] * np.exp(1j * np.pi * ks / n_points)
    a = np.zeros(n_modes + 1)
    b = np.zeros(n_modes)
    a[0] = spec[0].real
    a[1:] = 2.0 * spec[1:].real
    b[:] = -2.0 * spec[1:].imag
    return TrigSeries(a, b), th, vals


def rayleigh_quotient(trial, weight: BoundaryWeight,
                      n_points: int = 1 << 16) -> float:
    """Dirichlet energy of the harmonic extension over the weighted L2 norm.

    For a TrigSeries trial both numerator and denominator are exact. A
    callable trial is sampled on a shifted uniform grid of n_points; its
    energy comes from the projected coefficients (a lower bound converging as
    the trial is resolved) and its norm from direct quadrature.
    """
    if isinstance(trial, TrigSeries):
        energy = dirichlet_energy(trial)
        need = trial.n_modes + (weight.density.n_modes + 1) // 2 + 1
        grid = QuadratureGrid.for_modes(need)
        tv = values_on_grid(trial, grid.n_points)
        norm = float(np.mean(tv * tv * weight.density(grid.angles))) * TWO_PI
    else:
        series, th, vals = _project_shifted(trial, n_points // 2 - 1, n_points)
        energy = dirichlet_energy(series)
        norm = float(np.mean(vals * vals * weight.density(th))) * TWO_PI
    if not norm > 1e-13 * max(1.0, energy):
        raise DegenerateTrialError(
            f"trial has vanishing weighted boundary norm ({norm:.3e})")
    return energy / norm
