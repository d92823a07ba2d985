"""Cross-checks between the in-repo eigensolver route and references."""

import numpy as np
import pytest

from steklov_lab.eigen import (back_sub_transposed, cholesky_lower,
                               forward_sub, gen_eigh, jacobi_eigh)
from steklov_lab.errors import ResolutionError
from steklov_lab.oracles import brute_force_gevp


def random_spd(rng, n, cond=10.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d = np.exp(np.linspace(0.0, np.log(cond), n))
    return Q @ np.diag(d) @ Q.T


def test_cholesky_matches_numpy():
    rng = np.random.default_rng(1)
    for n in (1, 3, 7, 15):
        B = random_spd(rng, n)
        L = cholesky_lower(B)
        np.testing.assert_allclose(L, np.linalg.cholesky(B), rtol=1e-10, atol=1e-12)


def test_cholesky_rejects_indefinite():
    with pytest.raises(ResolutionError):
        cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_triangular_substitution():
    rng = np.random.default_rng(2)
    B = random_spd(rng, 9)
    L = cholesky_lower(B)
    Y = rng.standard_normal((9, 3))
    X = forward_sub(L, Y)
    np.testing.assert_allclose(L @ X, Y, atol=1e-12)
    Z = back_sub_transposed(L, Y)
    np.testing.assert_allclose(L.T @ Z, Y, atol=1e-12)
    y = rng.standard_normal(9)
    np.testing.assert_allclose(L @ forward_sub(L, y), y, atol=1e-12)


def test_jacobi_matches_lapack_eigh():
    rng = np.random.default_rng(3)
    for n in (2, 5, 12, 30):
        S = random_spd(rng, n, cond=100.0)
        vals, vecs = jacobi_eigh(S)
        ref = np.linalg.eigvalsh(S)
        np.testing.assert_allclose(vals, ref, rtol=1e-11, atol=1e-11)
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(n), atol=1e-11)
        np.testing.assert_allclose(S @ vecs, vecs * vals, atol=1e-9)


def test_gen_eigh_routes_agree():
    rng = np.random.default_rng(4)
    for n in (3, 8, 20):
        A0 = random_spd(rng, n)
        B = random_spd(rng, n)
        vj, uj = gen_eigh(A0, B, method="jacobi")
        vl, ul = gen_eigh(A0, B, method="lapack")
        np.testing.assert_allclose(vj, vl, rtol=1e-10, atol=1e-10)
        # both B-orthonormal
        np.testing.assert_allclose(uj.T @ B @ uj, np.eye(n), atol=1e-9)
        np.testing.assert_allclose(ul.T @ B @ ul, np.eye(n), atol=1e-9)


def test_gen_eigh_against_charpoly_oracle():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        A0 = random_spd(rng, n)
        B = random_spd(rng, n)
        vals, _ = gen_eigh(A0, B, method="jacobi")
        ref_vals, _ = brute_force_gevp(A0, B)
        np.testing.assert_allclose(vals, ref_vals, rtol=1e-10, atol=1e-10)


def test_gen_eigh_subset():
    rng = np.random.default_rng(6)
    A0 = random_spd(rng, 12)
    B = random_spd(rng, 12)
    full, _ = gen_eigh(A0, B, method="lapack")
    low, vecs = gen_eigh(A0, B, k_lowest=4, method="lapack")
    np.testing.assert_allclose(low, full[:4], rtol=1e-12)
    assert vecs.shape == (12, 4)
