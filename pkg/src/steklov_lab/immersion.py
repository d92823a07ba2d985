"""Candidate minimal immersions from eigenfunction triples, and their checks.

A critical weight with sigma_1 simple and sigma_2 double supplies three
eigenfunctions (phi_0, phi_1, phi_2) in prescribed parity classes. Scaled by
suitable positive constants they satisfy the pointwise boundary constraint

    sigma_1 Phi_0^2 + sigma_2 (Phi_1^2 + Phi_2^2) = 1   on S^1,

making Phi = (Phi_0, Phi_1, Phi_2) a conformal harmonic map whose image is a
free-boundary minimal disk inside an ellipsoid. Everything checkable about
that statement at finite resolution lives here: the constraint residual, the
Hopf (conformality) residual, boundary branch points, the winding and
Jacobian positivity behind embeddedness, nodal counts, the boundary-length
versus area identity, and the reconstruction of the weight from the map.

The eigenfunction gauge is fixed by rotating everything a quarter turn when
sigma_1's eigenfunction arrives in the cos-odd block, so that phi_0 is always
odd in y; the rotation angle is stored for weight comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.optimize import nnls

from .errors import InfeasibleError, InputDomainError, SpectrumError
from .steklov import BoundaryWeight, SteklovSpectrum
from .trig import (TrigSeries, dirichlet_energy, evaluate, rotate,
                   values_on_grid)

TWO_PI = 2.0 * np.pi


def _scaled(series: TrigSeries, factor: float) -> TrigSeries:
    return TrigSeries(factor * series.cos_coeffs, factor * series.sin_coeffs)


def _theta_derivative(series: TrigSeries) -> TrigSeries:
    ks = np.arange(1, series.n_modes + 1)
    a = np.concatenate(([0.0], ks * series.sin_coeffs))
    b = -ks * series.cos_coeffs[1:]
    return TrigSeries(a, b)


def _complex_gradient_poly(series: TrigSeries) -> np.ndarray:
    """Coefficients (highest first) of F(z) = sum_k k (a_k - i b_k) z^{k-1}.

    For the harmonic extension u of the series, u_x - i u_y = F(z); this is
    the workhorse for gradients and Jacobians off the boundary.
    """
    ks = np.arange(1, series.n_modes + 1)
    c = ks * (series.cos_coeffs[1:] - 1j * series.sin_coeffs)
    return c[::-1]


def _radial_powers(r: np.ndarray, n_modes: int) -> np.ndarray:
    """Matrix r_i^k for k = 1..n_modes, built by cumulative products."""
    return np.cumprod(np.tile(r[:, None], (1, n_modes)), axis=1)


def _interior_values(series: TrigSeries, r: np.ndarray,
                     theta: np.ndarray) -> np.ndarray:
    """Harmonic extension values at arrays of polar points."""
    n = series.n_modes
    if n == 0:
        return np.full(r.shape, series.cos_coeffs[0])
    ks = np.arange(1, n + 1)
    P = _radial_powers(np.asarray(r, float).ravel(), n)
    ang = np.outer(np.asarray(theta, float).ravel(), ks)
    vals = (series.cos_coeffs[0]
            + ((P * np.cos(ang)) @ series.cos_coeffs[1:])
            + ((P * np.sin(ang)) @ series.sin_coeffs))
    return vals.reshape(np.shape(r))


@dataclass(frozen=True)
class Immersion:
    """Eigenfunction triple scaled onto the boundary ellipsoid constraint.

    phi_i are the w-orthonormalized traces (phi2 is a zero series in the
    planar case); alpha holds the positive multipliers; Phi_i = alpha_i phi_i.
    sigma = (sigma_1, sigma_2, sigma_2) and ellipsoid_p = sigma_1/sigma_2 is
    the axis ratio of the ellipsoid p x0^2 + x1^2 + x2^2 = 1 carrying the
    sqrt(sigma_2)-rescaled image.
    """

    phi0: TrigSeries
    phi1: TrigSeries
    phi2: TrigSeries
    alpha: np.ndarray
    sigma: np.ndarray
    ellipsoid_p: float
    ellipsoid_residual: float
    gauge_angle: float
    planar: bool
    L: float

    def component(self, i: int) -> TrigSeries:
        """Scaled trace Phi_i = alpha_i phi_i."""
        phi = (self.phi0, self.phi1, self.phi2)[i]
        return _scaled(phi, float(self.alpha[i]))

    def components(self):
        return tuple(self.component(i) for i in range(3))


def _pick(spectrum: SteklovSpectrum, group, label: str):
    for j in group:
        if spectrum.block_labels[j] == label:
            return j
    return None


def build_immersion(spectrum: SteklovSpectrum, band: float = 1e-5,
                    grid_points: int = 2048) -> Immersion:
    """Select, gauge, and scale the eigenfunction triple of a spectrum.

    Requires a block-labeled spectrum (solve_spectrum_blocks). The scalings
    solve the boundary ellipsoid constraint in the nonnegative least-squares
    sense; an (effectively) zero scaling for a present component means the
    weight is not critical and raises InfeasibleError.
    """
    if spectrum.block_labels is None:
        raise SpectrumError(
            "immersion construction needs a parity-labeled spectrum")
    if spectrum.sigmas.size < 3:
        raise SpectrumError("need at least sigma_1 and sigma_2")
    groups = spectrum.multiplets(rtol=band)
    g1 = next(g for g in groups if 1 in g)
    g2 = next(g for g in groups if 2 in g)

    j0 = _pick(spectrum, g1, "sin_odd")
    gauge = 0.0
    if j0 is None:
        j0 = _pick(spectrum, g1, "cos_odd")
        if j0 is None:
            raise SpectrumError(
                "sigma_1 eigenfunction is not in an odd parity block; "
                "the weight does not have the expected critical structure")
        gauge = 0.5 * np.pi

    want1 = "cos_odd" if gauge == 0.0 else "sin_odd"
    j1 = _pick(spectrum, g2, want1)
    if j1 is None or j1 == j0:
        raise SpectrumError(
            "sigma_2 multiplet lacks the odd-in-x eigenfunction; "
            "the weight does not have the expected critical structure")
    j2 = _pick(spectrum, g2, "cos_even")

    def gauged(j: int) -> TrigSeries:
        t = spectrum.eigen_traces[j]
        return rotate(t, gauge) if gauge != 0.0 else t

    phi0 = gauged(j0)
    phi1 = gauged(j1)
    planar = j2 is None
    phi2 = gauged(j2) if not planar else TrigSeries.constant(0.0)

    s1 = float(spectrum.sigmas[j0])
    s2 = float(spectrum.sigmas[j1])
    if not planar and g1 == g2:
        raise SpectrumError("nonplanar immersion requires sigma_1 < sigma_2")

    cols = [s1 * values_on_grid(phi0, grid_points) ** 2,
            s2 * values_on_grid(phi1, grid_points) ** 2]
    if not planar:
        cols.append(s2 * values_on_grid(phi2, grid_points) ** 2)
    M = np.stack(cols, axis=1)
    sq, _ = nnls(M, np.ones(grid_points))
    if np.any(sq <= 1e-12):
        raise InfeasibleError(
            "ellipsoid constraint forces a zero scaling; the weight is not "
            f"critical (squared scalings {sq})")
    alpha = np.sqrt(np.concatenate((sq, [0.0])) if planar else sq)
    fit = M @ sq - 1.0
    residual = float(np.max(np.abs(fit)))

    return Immersion(phi0=phi0, phi1=phi1, phi2=phi2, alpha=alpha,
                     sigma=np.array([s1, s2, s2]),
                     ellipsoid_p=s1 / s2, ellipsoid_residual=residual,
                     gauge_angle=gauge, planar=planar, L=spectrum.L)


def weighted_masses(imm: Immersion, spectrum: SteklovSpectrum):
    """(int Phi_0^2 w dtheta, int (Phi_1^2 + Phi_2^2) w dtheta).

    The weight is rotated by the immersion gauge so that the masses refer to
    the same frame as the components. (Both integrals are actually gauge
    invariant for even_both weights; the rotation keeps this exact rather
    than approximate.)
    """
    density = spectrum.weight.density
    if imm.gauge_angle != 0.0:
        density = rotate(density, imm.gauge_angle)
    P = 1 << int(np.ceil(np.log2(
        4 * (max(imm.phi0.n_modes, 1) + density.n_modes) + 4)))
    w = values_on_grid(density, P)
    p0, p1, p2 = (values_on_grid(c, P) for c in imm.components())
    m0 = float(np.mean(p0 * p0 * w)) * TWO_PI
    m12 = float(np.mean((p1 * p1 + p2 * p2) * w)) * TWO_PI
    return m0, m12


# ------------------------------------------------------------ verifications

def verify_no_boundary_branch(imm: Immersion, n_samples: int = 4096) -> float:
    """min |Phi_theta| over the boundary; positive means no branch point."""
    acc = np.zeros(n_samples)
    for comp in imm.components():
        dv = values_on_grid(_theta_derivative(comp), n_samples)
        acc += dv * dv
    return float(np.sqrt(np.min(acc)))


def verify_conformality(imm: Immersion, n_r: int = 24,
                        n_theta: int = 512) -> float:
    """Normalized Hopf residual max |sum_i F_i^2| / |grad Phi|^2 on a grid.

    F_i = d_x Phi_i - i d_y Phi_i is holomorphic for harmonic components, and
    sum F_i^2 = |Phi_x|^2 - |Phi_y|^2 - 2 i Phi_x . Phi_y vanishes exactly
    when the immersion is conformal.
    """
    rs = np.linspace(1.0 / n_r, 1.0, n_r)
    th = TWO_PI * np.arange(n_theta) / n_theta
    z = (rs[:, None] * np.exp(1j * th)[None, :]).ravel()
    hopf = np.zeros_like(z)
    grad2 = np.zeros(z.size)
    for comp in imm.components():
        F = np.polyval(_complex_gradient_poly(comp), z)
        hopf += F * F
        grad2 += np.abs(F) ** 2
    scale = max(float(np.max(grad2)), 1e-300)
    gap = np.abs(hopf.real) + np.abs(hopf.imag)
    return float(np.max(gap) / scale)


def verify_critical_weight(imm: Immersion, weight: BoundaryWeight,
                           n_samples: int = 4096) -> float:
    """Mismatch between the weight and its reconstruction from the map.

    A critical weight equals |Phi_theta| / sqrt(sigma_1^2 Phi_0^2 +
    sigma_2^2 (Phi_1^2 + Phi_2^2)) up to normalization; both sides are scaled
    to integral 2 pi and compared in relative sup norm.
    """
    p0, p1, p2 = (values_on_grid(c, n_samples) for c in imm.components())
    speed2 = np.zeros(n_samples)
    for comp in imm.components():
        dv = values_on_grid(_theta_derivative(comp), n_samples)
        speed2 += dv * dv
    denom2 = (imm.sigma[0] ** 2 * p0 ** 2
              + imm.sigma[1] ** 2 * (p1 ** 2 + p2 ** 2))
    if np.min(denom2) <= 1e-24:
        raise InfeasibleError(
            "weight reconstruction denominator vanishes on the grid; "
            "boundary branch point suspected")
    recon = np.sqrt(speed2 / denom2)
    recon *= 1.0 / np.mean(recon)
    density = weight.density
    if imm.gauge_angle != 0.0:
        density = rotate(density, imm.gauge_angle)
    th = TWO_PI * np.arange(n_samples) / n_samples
    w = density(th)
    w = w / np.mean(w)
    return float(np.max(np.abs(recon - w) / w))


def verify_area_identity(imm: Immersion) -> float:
    """Relative gap in the boundary-length = twice-area identity.

    In the scale where the second eigenvalue is one, the boundary length of
    the critical metric is sigma_bar_2 and equals twice the immersed area;
    the area comes from the exact Fourier Dirichlet-energy formula.
    """
    area = 0.5 * sum(dirichlet_energy(c) for c in imm.components())
    sb2 = imm.sigma[1] * imm.L
    return float(abs(sb2 - 2.0 * imm.sigma[1] * area) / sb2)


# ------------------------------------------------------- embedding checks

def _winding_number(xs: np.ndarray, ys: np.ndarray):
    """(|degree|, min modulus) of a sampled closed curve about the origin."""
    mod = np.hypot(xs, ys)
    ang = np.arctan2(ys, xs)
    d = np.diff(np.concatenate((ang, ang[:1])))
    d = (d + np.pi) % TWO_PI - np.pi
    return abs(int(np.round(np.sum(d) / TWO_PI))), float(np.min(mod))


def _nodal_count(series: TrigSeries, resolution: int, thr_rel: float = 1e-9):
    """Connected sign domains of the harmonic extension on the disk.

    Only in-disk pixels are evaluated: outside the disk the radial powers
    r^k explode and would poison the sign threshold.
    """
    xs = np.linspace(-1.0, 1.0, resolution)
    X, Y = np.meshgrid(xs, xs)
    R = np.hypot(X, Y)
    mask = R <= 1.0
    flat_r = R[mask]
    flat_t = np.arctan2(Y, X)[mask]
    chunk = 1 << 14
    out = np.empty(flat_r.size)
    for lo in range(0, flat_r.size, chunk):
        hi = min(lo + chunk, flat_r.size)
        out[lo:hi] = _interior_values(series, flat_r[lo:hi], flat_t[lo:hi])
    vals = np.zeros_like(R)
    vals[mask] = out
    thr = thr_rel * max(float(np.max(np.abs(out))), 1e-300)
    n_pos = ndimage.label(mask & (vals > thr))[1]
    n_neg = ndimage.label(mask & (vals < -thr))[1]
    return n_pos + n_neg


def embedding_diagnostics(imm: Immersion, resolution: int = 512,
                          n_boundary: int = 4096):
    """(winding, jacobian_min, nodal_counts) behind the embeddedness claims.

    Nonplanar: eta = (Phi_1, Phi_2) is traced along the boundary of the upper
    half disk (its winding must be 1 and it must not vanish there), and its
    Jacobian is sampled over the open upper half disk. Planar: the map
    (Phi_0, Phi_1) itself is checked on the full disk, where winding 1 of the
    boundary curve is the diffeomorphism criterion.
    """
    if imm.planar:
        e1 = values_on_grid(imm.component(0), n_boundary)
        e2 = values_on_grid(imm.component(1), n_boundary)
        winding, min_mod = _winding_number(e1, e2)
        if min_mod <= 1e-9:
            raise InfeasibleError("planar boundary curve passes through 0")
        F1 = _complex_gradient_poly(imm.component(0))
        F2 = _complex_gradient_poly(imm.component(1))
        rs = np.linspace(0.0, 1.0 - 1.0 / resolution, resolution // 2)
        ths = TWO_PI * np.arange(resolution) / resolution
        z = (rs[:, None] * np.exp(1j * ths)[None, :]).ravel()
        nodal = (_nodal_count(imm.phi0, resolution),
                 _nodal_count(imm.phi1, resolution), None)
    else:
        # boundary of the upper half disk: diameter then upper semicircle
        n_half = n_boundary // 2
        x_d = np.linspace(-1.0, 1.0, n_half, endpoint=False)
        r_d = np.abs(x_d)
        t_d = np.where(x_d >= 0.0, 0.0, np.pi)
        th_c = np.linspace(0.0, np.pi, n_half, endpoint=False)
        e1 = np.concatenate((
            _interior_values(imm.component(1), r_d, t_d),
            evaluate(imm.component(1), th_c)))
        e2 = np.concatenate((
            _interior_values(imm.component(2), r_d, t_d),
            evaluate(imm.component(2), th_c)))
        winding, min_mod = _winding_number(e1, e2)
        if min_mod <= 1e-9:
            raise InfeasibleError(
                "eta vanishes on the half-disk boundary (Step-1 violation)")
        F1 = _complex_gradient_poly(imm.component(1))
        F2 = _complex_gradient_poly(imm.component(2))
        rs = np.linspace(1.0 / resolution, 1.0 - 1.0 / resolution,
                         resolution // 2)
        ths = np.pi * (np.arange(1, resolution) / resolution)
        z = (rs[:, None] * np.exp(1j * ths)[None, :]).ravel()
        nodal = (_nodal_count(imm.phi0, resolution),
                 _nodal_count(imm.phi1, resolution),
                 _nodal_count(imm.phi2, resolution))

    G1 = np.polyval(F1, z)
    G2 = np.polyval(F2, z)
    dets = np.imag(G1 * np.conj(G2))
    if np.median(dets) < 0.0:     # orientation is a gauge choice
        dets = -dets
    jacobian_min = float(np.min(dets))
    return winding, jacobian_min, nodal


@dataclass(frozen=True)
class Diagnostics:
    """Every residual and count the verification suite produces, in one place."""

    ellipsoid_residual: float
    conformality_residual: float
    min_boundary_speed: float
    jacobian_min: float
    winding: int
    nodal_counts: tuple
    area: float
    critical_weight_mismatch: float


def collect_diagnostics(imm: Immersion, weight: BoundaryWeight,
                        resolution: int = 512) -> Diagnostics:
    """Run the full verification suite for one immersion against its weight."""
    winding, jac_min, nodal = embedding_diagnostics(imm, resolution=resolution)
    area = 0.5 * sum(dirichlet_energy(c) for c in imm.components())
    return Diagnostics(
        ellipsoid_residual=imm.ellipsoid_residual,
        conformality_residual=verify_conformality(imm),
        min_boundary_speed=verify_no_boundary_branch(imm),
        jacobian_min=jac_min,
        winding=winding,
        nodal_counts=nodal,
        area=float(area),
        critical_weight_mismatch=verify_critical_weight(imm, weight))


def second_component_axis_min(imm: Immersion, n_samples: int = 257) -> float:
    """min |Phi_2| over the closed horizontal diameter and the two poles."""
    xs = np.linspace(-1.0, 1.0, n_samples)
    r = np.abs(xs)
    t = np.where(xs >= 0.0, 0.0, np.pi)
    vals = np.abs(_interior_values(imm.component(2), r, t))
    poles = np.abs(evaluate(imm.component(2), np.array([0.5 * np.pi,
                                                        1.5 * np.pi])))
    return float(min(np.min(vals), np.min(poles)))


# ------------------------------------------------------------------ export

def export_surface(imm: Immersion, resolution: int, obj_path: str,
                   csv_path: str | None = None):
    """Write the sqrt(sigma_2)-scaled image of the (r, theta) grid as OBJ.

    Vertices then satisfy p x0^2 + x1^2 + x2^2 <= 1 (+ residual slack) with
    p = ellipsoid_p. Optionally also writes boundary samples as CSV with
    header theta,x0,x1,x2.
    """
    if resolution < 2:
        raise InputDomainError("resolution must be at least 2")
    scale = np.sqrt(imm.sigma[1])
    n_r, n_t = resolution, 2 * resolution
    rs = np.linspace(0.0, 1.0, n_r + 1)[1:]
    ths = TWO_PI * np.arange(n_t) / n_t
    R = np.repeat(rs, n_t)
    T = np.tile(ths, n_r)
    comps = [scale * _interior_values(c, R, T) for c in imm.components()]
    center = [scale * _interior_values(c, np.array([0.0]), np.array([0.0]))[0]
              for c in imm.components()]

    lines = ["# free-boundary minimal disk sample mesh"]
    lines.append(f"v {center[0]:.12g} {center[1]:.12g} {center[2]:.12g}")
    for i in range(R.size):
        lines.append(f"v {comps[0][i]:.12g} {comps[1][i]:.12g} {comps[2][i]:.12g}")

    def vid(ir, it):      # 1-based OBJ ids; vertex 1 is the center
        return 2 + ir * n_t + (it % n_t)

    for it in range(n_t):
        lines.append(f"f 1 {vid(0, it)} {vid(0, it + 1)}")
    for ir in range(n_r - 1):
        for it in range(n_t):
            a = vid(ir, it)
            b = vid(ir, it + 1)
            c = vid(ir + 1, it)
            d = vid(ir + 1, it + 1)
            lines.append(f"f {a} {b} {d}")
            lines.append(f"f {a} {d} {c}")
    with open(obj_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")

    if csv_path is not None:
        th = TWO_PI * np.arange(n_t) / n_t
        b = [scale * evaluate(c, th) for c in imm.components()]
        rows = ["theta,x0,x1,x2"]
        for j in range(n_t):
            rows.append(f"{th[j]:.12g},{b[0][j]:.12g},{b[1][j]:.12g},{b[2][j]:.12g}")
        with open(csv_path, "w", encoding="ascii") as fh:
            fh.write("\n".join(rows) + "\n")
    return obj_path
