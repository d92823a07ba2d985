"""Subgradient descent for the two-eigenvalue objective over symmetric weights.

The search space is the lattice of log-densities v = sum_k c_k cos(2k theta)
(even in both axes, positivity free of charge), with the total mass pinned to
int e^v dtheta = 2 pi after every update; the objective is scale-invariant,
so the pinning only removes a flat direction.

The objective is nonsmooth where sigma_2 is degenerate, and the minimizers
of interest sit exactly on such a crease. Descent therefore uses the
minimum-norm element of the subdifferential hull spanned by the near-multiplet
eigenfunctions, which vanishes at the crease minimum instead of chattering
across it. Line search is plain Armijo with step doubling on success.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DependencyError, InfeasibleError, InputDomainError,
                     InvariantViolation, PositivityError, ResolutionError,
                     SpectrumError, SymmetryError)
from .functional import FunctionalParams, f_st, h_partials, h_value
from .steklov import BoundaryWeight, SteklovSpectrum, solve_spectrum_blocks
from .trig import (Parity, TrigSeries, from_grid_values, values_on_grid)

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class OptimizerConfig:
    n_modes: int = 32          # number of cos(2k theta) log-density modes
    solver_N: int = 128        # Fourier truncation of the spectral solves
    max_iters: int = 1000
    step_init: float = 0.5
    armijo_factor: float = 1e-4
    grad_tol: float = 1e-4
    mass_tol: float = 1e-3
    seed: int = 0
    grid_points: int = 4096    # sampling grid for exp/FFT plumbing
    k_max: int = 6             # eigenvalues tracked during descent
    cluster_band: float = 1e-5  # relative width of the sigma_2 multiplet hull
    kink_band: float = 1e-8    # relative width treated as sigma_1 = sigma_2
    log_bound: float = 12.0    # |v| beyond this is treated as divergence
    step_cap: float = 4.0

    def __post_init__(self):
        if self.solver_N < 4 * self.n_modes:
            raise InputDomainError(
                f"solver_N = {self.solver_N} must be at least 4 * n_modes = "
                f"{4 * self.n_modes}")
        P = self.grid_points
        if P & (P - 1) or P < 8 * self.solver_N:
            raise InputDomainError(
                "grid_points must be a power of two >= 8 * solver_N")


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of one minimize run.

    p and L follow the normalization in which the second eigenvalue is one:
    L = sigma_bar_2 (so the strict 4 pi bound applies) and p = the ratio
    sigma_bar_1 / sigma_bar_2 of the ellipsoid the immersion lands on.
    """

    weight: BoundaryWeight
    spectrum: SteklovSpectrum
    objective_trace: np.ndarray
    subgrad_norm: float
    mass_residuals: tuple
    planarity_flag: bool
    p: float
    L: float
    converged: bool
    iterations: int
    stall_reason: str | None = None

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0 + 1e-12):
            raise InvariantViolation(f"eigenvalue ratio p = {self.p} outside (0, 1]")
        if not (0.0 < self.L < FOUR_PI):
            raise InvariantViolation(
                f"normalized length L = {self.L} outside (0, 4 pi)")

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


# --------------------------------------------------------------- plumbing

def _coeffs_from_weight(weight: BoundaryWeight, n_modes: int,
                        grid_points: int) -> np.ndarray:
    """Extract cos(2k) log-density coefficients from a starting weight."""
    if weight.symmetry_class is not Parity.EVEN_BOTH:
        raise SymmetryError("optimizer starts need a weight even in both axes")
    if weight.log_coeffs is not None:
        log = weight.log_coeffs
    else:
        vals = values_on_grid(weight.density, grid_points)
        log = from_grid_values(np.log(vals), 2 * n_modes)
    c = np.zeros(n_modes)
    top = min(n_modes, log.n_modes // 2)
    c[:top] = log.cos_coeffs[2:2 * top + 1:2]
    return c


def _weight_from_coeffs(c: np.ndarray, config: OptimizerConfig):
    """Log-coefficients -> (BoundaryWeight, grid values of w).

    The constant mode is chosen so that int w dtheta = 2 pi exactly on the
    sampling grid.
    """
    K = c.size
    a = np.zeros(2 * K + 1)
    a[2::2] = c
    v = TrigSeries(a, np.zeros(2 * K))
    P = config.grid_points
    v_vals = values_on_grid(v, P)
    if np.max(np.abs(v_vals)) > config.log_bound:
        raise PositivityError("log-density out of bounds")
    shift = -np.log(np.mean(np.exp(v_vals)))
    w_vals = np.exp(v_vals + shift)
    a = a.copy()
    a[0] = shift
    v_full = TrigSeries(a, np.zeros(2 * K))
    density = from_grid_values(w_vals, 2 * config.solver_N)
    return BoundaryWeight(density, log_coeffs=v_full), w_vals


def _cos_table(vals: np.ndarray, max_mode: int) -> np.ndarray:
    """Ic[m] = int vals(theta) cos(m theta) dtheta from grid samples."""
    F = np.fft.rfft(vals) / vals.size
    Ic = TWO_PI * F[:max_mode + 1].real
    return Ic


def _solve_at(c: np.ndarray, params: FunctionalParams, config: OptimizerConfig):
    """Objective, spectrum, weight, and grid values at a coefficient vector."""
    weight, w_vals = _weight_from_coeffs(c, config)
    spec = solve_spectrum_blocks(weight, N=config.solver_N,
                                 k_max=config.k_max, method="lapack",
                                 check=False)
    if spec.sigmas.size < 3 or spec.sigmas[1] <= 0.0:
        raise SpectrumError("degenerate spectrum during descent")
    E = h_value(params, spec.normalized[1], spec.normalized[2])
    return E, spec, weight, w_vals


def _objective_only(c: np.ndarray, params: FunctionalParams,
                    config: OptimizerConfig) -> float:
    """Line-search probe: objective value, +inf on any numerical failure."""
    try:
        E, *_ = _solve_at(c, params, config)
        return E
    except (PositivityError, ResolutionError, InvariantViolation,
            SpectrumError, np.linalg.LinAlgError, FloatingPointError):
        return np.inf


def _project_simplex(mu: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {mu >= 0, sum mu = 1}."""
    u = np.sort(mu)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.flatnonzero(u - css / np.arange(1, mu.size + 1) > 0.0)[-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(mu - tau, 0.0)


def _min_norm_combination(base: np.ndarray, cands: np.ndarray) -> np.ndarray:
    """argmin over the simplex of || base + sum_j mu_j cands_j ||."""
    m = cands.shape[0]
    if m == 1:
        return base + cands[0]
    if m == 2:
        delta = cands[1] - cands[0]
        g0 = base + cands[0]
        denom = float(delta @ delta)
        mu = 0.0 if denom == 0.0 else float(np.clip(-(g0 @ delta) / denom, 0.0, 1.0))
        return g0 + mu * delta
    # projected gradient on the simplex for the rare >= 3 case
    G = cands @ cands.T
    lip = float(np.linalg.eigvalsh(G)[-1]) + 1e-30
    mu = np.full(m, 1.0 / m)
    for _ in range(300):
        grad = cands @ (base + mu @ cands)
        mu = _project_simplex(mu - grad / lip)
    return base + mu @ cands


def _descent_direction(spec: SteklovSpectrum, w_vals: np.ndarray,
                       params: FunctionalParams, config: OptimizerConfig):
    """Minimum-norm subgradient of E in the cos(2k) coefficient space."""
    K = config.n_modes
    L = spec.L
    even = 2 * np.arange(1, K + 1)
    Icw = _cos_table(w_vals, 2 * K)[even]
    d1, d2 = h_partials(params, spec.normalized[1], spec.normalized[2])

    def sigma_grad(j: int) -> np.ndarray:
        tv = values_on_grid(spec.eigen_traces[j], w_vals.size)
        Icf = _cos_table(tv * tv * w_vals, 2 * K)[even]
        return spec.normalized[j] * (Icw / L - Icf)

    sb = spec.normalized
    sb1, sb2 = sb[1], sb[2]
    if sb2 - sb1 <= config.kink_band * sb2:
        # sigma_1 and sigma_2 genuinely cross (the flat disk at t = 1, or the
        # crossing the descent rides for t < 1). Valid subdifferential
        # elements assign the two h-slots to two distinct cluster members in
        # every order; minimize over that hull so kink components cancel
        # instead of blocking the line search.
        near = [j for j in range(1, sb.size)
                if abs(sb[j] - sb2) <= config.cluster_band * sb2
                or abs(sb[j] - sb1) <= config.cluster_band * sb1]
        grads = [sigma_grad(j) for j in near]
        cands = np.array([d1 * grads[i] + d2 * grads[j]
                          for i in range(len(grads))
                          for j in range(len(grads)) if i != j])
        G = _min_norm_combination(np.zeros(K), cands)
        return G, float(np.linalg.norm(G))
    # sigma_1's (effectively simple) slot, then the sigma_2 multiplet, kept
    # clear of sigma_1 so a narrow gap still descends by exact gradients
    g1_members = [j for j in range(1, sb.size)
                  if sb[j] <= sb1 * (1.0 + config.kink_band)]
    g2_members = [j for j in range(1, sb.size)
                  if abs(sb[j] - sb2) <= config.cluster_band * sb2
                  and sb[j] > sb1 * (1.0 + config.kink_band)]
    base = d1 * np.mean([sigma_grad(j) for j in g1_members], axis=0)
    cands = np.array([d2 * sigma_grad(j) for j in g2_members])
    G = _min_norm_combination(base, cands)
    return G, float(np.linalg.norm(G))


# ---------------------------------------------------------------- minimize

def minimize(params: FunctionalParams, config: OptimizerConfig,
             initial: BoundaryWeight) -> OptimizationResult:
    """Minimize E from a symmetric positive start; returns the best iterate.

    Descent stops at subgrad_norm <= grad_tol, at max_iters, or on a stall
    (no Armijo decrease down to the minimal step, the signature of a
    multiplet kink the minimum-norm hull does not span).
    """
    c = _coeffs_from_weight(initial, config.n_modes, config.grid_points)
    E, spec, weight, w_vals = _solve_at(c, params, config)
    trace = [E]
    best_c, best_E = c.copy(), E
    step = config.step_init
    gnorm = np.inf
    stall = None
    iterations = 0
    converged = False

    for it in range(config.max_iters):
        G, gnorm = _descent_direction(spec, w_vals, params, config)
        if gnorm <= config.grad_tol:
            converged = True
            break
        lam = step
        accepted = False
        while lam >= 1e-12:
            c_try = c - lam * G
            E_try = _objective_only(c_try, params, config)
            if E_try <= E - config.armijo_factor * lam * gnorm ** 2:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            stall = ("no Armijo decrease at minimal step; subgradient kink "
                     f"suspected (|psi| = {gnorm:.3e})")
            break
        iterations = it + 1
        c = c - lam * G
        E, spec, weight, w_vals = _solve_at(c, params, config)
        trace.append(E)
        if E < best_E:
            best_E, best_c = E, c.copy()
        step = min(2.0 * lam, config.step_cap)

    # rebuild the best iterate with full checking and a deeper spectrum
    weight, final_w_vals = _weight_from_coeffs(best_c, config)
    spectrum = solve_spectrum_blocks(weight, N=config.solver_N, k_max=8,
                                     method="lapack", check=True)
    _, final_gnorm = _descent_direction(spectrum, final_w_vals, params, config)
    return OptimizationResult(
        weight=weight, spectrum=spectrum,
        objective_trace=np.array(trace), subgrad_norm=final_gnorm,
        mass_residuals=_mass_residuals(spectrum, params),
        planarity_flag=_is_planar(spectrum, config.cluster_band),
        p=float(spectrum.normalized[1] / spectrum.normalized[2]),
        L=float(spectrum.normalized[2]),
        converged=final_gnorm <= config.grad_tol,
        iterations=iterations, stall_reason=stall)


def _is_planar(spectrum: SteklovSpectrum, band: float) -> bool:
    """True when the second eigenspace has no even-in-both component.

    A non-planar immersion needs the even_both eigenfunction of the double
    sigma_2; when the multiplet consists of odd modes only, the candidate
    surface degenerates to a plane.
    """
    groups = spectrum.multiplets(rtol=band)
    g2 = next(g for g in groups if 2 in g)
    labels = spectrum.block_labels
    if labels is None:
        return True
    return not any(labels[j] == "cos_even" for j in g2)


# -------------------------------------------------------------- residuals

def _mass_residuals(spectrum: SteklovSpectrum,
                    params: FunctionalParams) -> tuple:
    from .immersion import build_immersion, weighted_masses

    if spectrum.sigmas.size < 3:
        raise DependencyError("criticality residuals need sigma_1 and sigma_2")
    try:
        imm = build_immersion(spectrum)
    except (InfeasibleError, SpectrumError):
        # no admissible scaling exists, so the weight is simply not critical
        return (np.inf, np.inf)
    m0, m12 = weighted_masses(imm, spectrum)
    sb1, sb2 = spectrum.normalized[1], spectrum.normalized[2]
    L = spectrum.L
    f = f_st(params, sb1, sb2)
    s = params.s
    target0 = sb1 ** (-s - 1.0) * L * L / f
    target12 = params.t * sb2 ** (-s - 1.0) * L * L / f
    return (abs(m0 - target0) / target0, abs(m12 - target12) / target12)


def criticality_residuals(result: OptimizationResult,
                          params: FunctionalParams) -> tuple:
    """Relative deviations of the two critical-density mass identities.

    With the immersion components scaled onto the ellipsoid
    sigma_1 Phi_0^2 + sigma_2 (Phi_1^2 + Phi_2^2) = 1, a critical density
    must satisfy

        int Phi_0^2 w dtheta             = sb1^{-s-1} L^2 / f
        int (Phi_1^2 + Phi_2^2) w dtheta = t sb2^{-s-1} L^2 / f

    where f = sb1^{-s} + t sb2^{-s}; the two identities sum to the exact
    relation sigma_1 m_0 + sigma_2 m_12 = L, so their residuals measure how
    the mass splits between the eigenspaces, not overall consistency.
    """
    return _mass_residuals(result.spectrum, params)


# ------------------------------------------------------------------ sweep

@dataclass(frozen=True)
class SweepRow:
    t: float
    sigma_bar_1: float
    sigma_bar_2: float
    p: float
    L: float
    E: float
    converged: bool
    flagged: bool
    note: str


def sweep_t(s: float, t_grid, config: OptimizerConfig,
            initial: BoundaryWeight | None = None) -> list:
    """Warm-started minimizations along an ascending t grid.

    Consecutive rows are checked for the expected monotone trends
    (sigma_bar_1 non-increasing, sigma_bar_2 non-decreasing, within 1e-6
    slack); violations flag the row and the sweep continues.
    """
    t_grid = np.asarray(list(t_grid), dtype=float)
    if t_grid.size == 0 or np.any(np.diff(t_grid) <= 0.0):
        raise InputDomainError("t grid must be ascending and nonempty")
    if initial is None:
        initial = BoundaryWeight.from_density(
            TrigSeries.from_cos([1.0, 0.0, 0.2]))
    rows = []
    warm = initial
    prev = None
    for t in t_grid:
        res = minimize(FunctionalParams(s=s, t=float(t)), config, warm)
        sb1 = res.p * res.L
        sb2 = res.L
        flagged = False
        notes = []
        if not res.converged:
            flagged = True
            notes.append("not converged")
        if prev is not None:
            if sb1 > prev[0] + 1e-6:
                flagged = True
                notes.append("sigma_bar_1 increased")
            if sb2 < prev[1] - 1e-6:
                flagged = True
                notes.append("sigma_bar_2 decreased")
        rows.append(SweepRow(t=float(t), sigma_bar_1=sb1, sigma_bar_2=sb2,
                             p=res.p, L=res.L, E=res.objective,
                             converged=res.converged, flagged=flagged,
                             note="; ".join(notes)))
        warm = res.weight
        prev = (sb1, sb2)
    return rows
