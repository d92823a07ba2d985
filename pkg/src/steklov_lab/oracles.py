"""Slow brute-force reference computations.

Everything here exists to cross-check the fast paths in the rest of the
package, trading speed for obviousness. Nothing in this module is called by
production code; the test suite imports it freely.
"""

from __future__ import annotations

import numpy as np

from .trig import TrigSeries, QuadratureGrid, evaluate


def brute_force_gevp(A: np.ndarray, B: np.ndarray, n_grid: int = 4097):
    """Eigenpairs of A u = lambda B u via characteristic-polynomial bracketing.

    Scans sign changes of det(A - lambda B) (through slogdet) on a fine grid
    over [0 - eps, trace(B^{-1}A) + eps], bisects each bracket, then recovers
    eigenvectors by inverse iteration. Only sensible for tiny matrices.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    T = float(np.trace(np.linalg.solve(B, A)))
    lo = -1e-9 * (1.0 + abs(T))
    hi = T * (1.0 + 1e-9) + 1e-9
    grid = np.linspace(lo, hi, n_grid)

    def det_sign(lam: float) -> float:
        sign, _ = np.linalg.slogdet(A - lam * B)
        return sign

    signs = np.array([det_sign(g) for g in grid])
    roots = []
    for i in range(n_grid - 1):
        if signs[i] == 0.0:
            roots.append(grid[i])
            continue
        if signs[i] * signs[i + 1] < 0.0:
            a, b = grid[i], grid[i + 1]
            sa = signs[i]
            for _ in range(200):
                m = 0.5 * (a + b)
                sm = det_sign(m)
                if sm == 0.0:
                    a = b = m
                    break
                if sa * sm < 0.0:
                    b = m
                else:
                    a, sa = m, sm
            roots.append(0.5 * (a + b))
    if len(roots) != n:
        raise RuntimeError(
            f"bracketing found {len(roots)} roots, expected {n}; "
            "eigenvalues may be too clustered for this oracle")
    vals = np.array(sorted(roots))

    vecs = np.zeros((n, n))
    rng = np.random.default_rng(0)
    for j, lam in enumerate(vals):
        M = A - lam * B
        # regularize the singular shift slightly off the root
        shift = 1e-12 * (1.0 + abs(lam))
        x = rng.standard_normal(n)
        for _ in range(50):
            try:
                x = np.linalg.solve(M + shift * B, B @ x)
            except np.linalg.LinAlgError:
                shift *= 10.0
                continue
            x /= np.linalg.norm(x)
        # B-normalize, fix sign
        x /= np.sqrt(x @ B @ x)
        k = int(np.argmax(np.abs(x)))
        if x[k] < 0:
            x = -x
        vecs[:, j] = x
    return vals, vecs


def quadrature_mass_matrix(weight: TrigSeries, n_modes: int,
                           n_quad: int | None = None) -> np.ndarray:
    """Mass matrix entries by direct quadrature, one integral per entry.

    Basis order matches trig.mass_matrix: 1, cos t, sin t, cos 2t, sin 2t, ...
    """
    if n_quad is None:
        n_quad = QuadratureGrid.for_modes(2 * n_modes + weight.n_modes).n_points
    theta = 2.0 * np.pi * np.arange(n_quad) / n_quad
    w = weight(theta)
    dim = 2 * n_modes + 1
    basis = np.empty((dim, n_quad))
    basis[0] = 1.0
    for k in range(1, n_modes + 1):
        basis[2 * k - 1] = np.cos(k * theta)
        basis[2 * k] = np.sin(k * theta)
    M = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            val = np.mean(basis[i] * basis[j] * w) * 2.0 * np.pi
            M[i, j] = M[j, i] = val
    return M


def finite_difference_functional_gradient(energy_fn, v: np.ndarray,
                                          h: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function of cosine coefficients."""
    v = np.asarray(v, dtype=float)
    g = np.zeros_like(v)
    for k in range(v.size):
        e = np.zeros_like(v)
        e[k] = h
        g[k] = (energy_fn(v + e) - energy_fn(v - e)) / (2.0 * h)
    return g


def prufer_block_eigenvalue_count(A_diag: np.ndarray, B: np.ndarray,
                                  lam: float) -> int:
    """Number of eigenvalues of diag(A_diag) u = x B u strictly below lam.

    Uses Sylvester inertia of A - lam B via an LDL^T-style elimination; this
    is the 'shooting count' the parity-block tests compare block unions
    against full solves with.
    """
    M = np.diag(np.asarray(A_diag, dtype=float)) - lam * np.asarray(B, float)
    n = M.shape[0]
    count = 0
    M = M.copy()
    for j in range(n):
        d = M[j, j]
        if d == 0.0:
            d = 1e-300
        if d < 0.0:
            count += 1
        M[j + 1:, j + 1:] -= np.outer(M[j + 1:, j], M[j, j + 1:]) / d
    return count


def series_product_integral(f: TrigSeries, g: TrigSeries,
                            w: TrigSeries) -> float:
    """integral f g w dtheta by honest dense quadrature."""
    grid = QuadratureGrid.for_modes(f.n_modes + g.n_modes + w.n_modes)
    th = grid.angles
    return float(np.mean(evaluate(f, th) * evaluate(g, th) * w(th))
                 * 2.0 * np.pi)
