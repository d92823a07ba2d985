"""Dense symmetric generalized eigensolvers.

Two interchangeable routes solve A u = lambda B u with B symmetric positive
definite:

  * an in-repo route: own Cholesky factorization, own triangular substitution,
    and a cyclic Jacobi eigensolve, with no calls into LAPACK;
  * the LAPACK route via scipy.linalg.eigh, used by default for matrices too
    large for the Jacobi path to be economical.

Both return eigenvalues ascending and B-orthonormal eigenvectors. The test
suite cross-checks them against each other and against a characteristic
polynomial oracle (see oracles.brute_force_gevp).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import ResolutionError, SpectrumError

# Above this size the O(n^3)-with-Python-overhead Jacobi sweep stops being
# reasonable and "auto" switches to LAPACK.
JACOBI_LIMIT = 48


def cholesky_lower(B: np.ndarray) -> np.ndarray:
    """Own Cholesky B = L L^T. Raises ResolutionError if B is not SPD."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    L = np.zeros_like(B)
    for j in range(n):
        d = B[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0 or not np.isfinite(d):
            raise ResolutionError(
                f"matrix not numerically SPD at pivot {j} (d = {d:.3e}); "
                "the weight is likely under-resolved, retry with larger N")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (B[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def forward_sub(L: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Solve L X = Y for lower-triangular L."""
    n = L.shape[0]
    X = np.array(Y, dtype=float, copy=True)
    if X.ndim == 1:
        X = X[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(n):
        if i:
            X[i] -= L[i, :i] @ X[:i]
        X[i] /= L[i, i]
    return X[:, 0] if squeeze else X


def back_sub_transposed(L: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Solve L^T X = Y for lower-triangular L."""
    n = L.shape[0]
    X = np.array(Y, dtype=float, copy=True)
    if X.ndim == 1:
        X = X[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            X[i] -= L[i + 1:, i] @ X[i + 1:]
        X[i] /= L[i, i]
    return X[:, 0] if squeeze else X


def jacobi_eigh(S: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvectors as columns).
    """
    A = np.array(S, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V
    base = np.linalg.norm(A)
    for _ in range(max_sweeps):
        # norm of the off-diagonal part, computed directly: the textbook
        # ||A||^2 - ||diag||^2 shortcut cancels catastrophically near
        # convergence and stops the iteration a sweep too early
        off = np.linalg.norm(A - np.diag(A.diagonal()))
        if off <= tol * max(base, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # standard stable rotation angle; for huge tau the closed
                # form overflows, but t ~ 1/(2 tau) there
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e8:
                    t = 0.5 / tau
                elif tau != 0.0:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp, rq = A[p].copy(), A[q].copy()
                A[p], A[q] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    vals = A.diagonal().copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], V[:, order]


def gen_eigh(A: np.ndarray, B: np.ndarray, k_lowest: int | None = None,
             method: str = "auto"):
    """Solve A u = lambda B u, returning the k_lowest smallest pairs.

    method: 'auto' picks 'jacobi' (in-repo) up to JACOBI_LIMIT and 'lapack'
    beyond. Eigenvectors come back B-orthonormal, eigenvalues ascending.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    if k_lowest is None or k_lowest > n:
        k_lowest = n
    if method == "auto":
        method = "jacobi" if n <= JACOBI_LIMIT else "lapack"
    if method == "jacobi":
        L = cholesky_lower(B)
        # C = L^{-1} A L^{-T}, symmetric
        C = forward_sub(L, forward_sub(L, A.T).T)
        C = 0.5 * (C + C.T)
        vals, Y = jacobi_eigh(C)
        vecs = back_sub_transposed(L, Y)
        return vals[:k_lowest], vecs[:, :k_lowest]
    if method == "lapack":
        try:
            if k_lowest < n:
                vals, vecs = sla.eigh(A, B, subset_by_index=[0, k_lowest - 1])
            else:
                vals, vecs = sla.eigh(A, B)
        except sla.LinAlgError as exc:
            raise ResolutionError(
                f"generalized eigensolve failed ({exc}); the weight is likely "
                "under-resolved, retry with larger N") from exc
        return vals, vecs
    raise SpectrumError(f"unknown eigensolver method {method!r}")
