"""Ellipse pullback: conformal map quality, exact eigenvalues, index ranks."""

import math

import numpy as np
import pytest

from steklov_lab.ellipse import (EllipseProblem, IndexResult, compute_indices,
                                 conformal_map, estimate_theta_star,
                                 indices_csv, pullback_weight)
from steklov_lab.errors import (DependencyError, InputDomainError,
                                InvariantViolation, ResolutionError)
from steklov_lab.steklov import solve_spectrum_blocks
from steklov_lab.trig import Parity, evaluate

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def half_problem():
    return conformal_map(0.5)


@pytest.fixture(scope="module")
def half_weight(half_problem):
    return pullback_weight(half_problem)


def test_circle_map_is_identity():
    pr = conformal_map(1.0)
    assert pr.map_coeffs[0] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(pr.map_coeffs[1:])) <= 1e-12
    w = pullback_weight(pr)
    assert w.density.cos_coeffs[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(w.density.cos_coeffs[1:])) <= 1e-12
    res = compute_indices(1.0, N=48)
    assert (res.k1, res.k2) == (1, 1)


def test_boundary_fit_on_fresh_grid():
    pr = conformal_map(0.25)
    assert pr.fit_residual <= 1e-8
    # recompute the defect away from the solver's own collocation points
    th = np.linspace(0.0, TWO_PI, 1000, endpoint=False) + 0.0007
    ks = 2 * np.arange(pr.map_degree) + 1
    f = np.exp(1j * np.outer(th, ks)) @ pr.map_coeffs
    defect = 0.25 * f.real**2 + f.imag**2 - 1.0
    assert np.max(np.abs(defect)) <= 2e-8


def test_map_area_identity():
    # the image area pi sum k c_k^2 must equal the ellipse area pi / sqrt(p)
    pr = conformal_map(0.6)
    ks = 2 * np.arange(pr.map_degree) + 1
    area = math.pi * float(ks @ pr.map_coeffs**2)
    assert area == pytest.approx(math.pi / math.sqrt(0.6), rel=1e-9)


def test_map_coefficient_structure():
    pr = conformal_map(0.8)
    c = pr.map_coeffs
    assert float(c.sum()) == pytest.approx(1.0 / math.sqrt(0.8), rel=1e-12)
    assert np.all(c[:12] > 0.0)
    assert np.all(np.diff(c[:12]) < 0.0)


def test_pullback_weight_shape(half_weight):
    assert half_weight.density.parity is Parity.EVEN_BOTH
    assert half_weight.min_density > 0.0
    assert half_weight.length == pytest.approx(TWO_PI / math.sqrt(0.5),
                                               rel=1e-7)


def test_coordinate_eigenvalues_present(half_problem, half_weight):
    spec = solve_spectrum_blocks(half_weight, N=128, k_max=8,
                                 method="lapack", check=False)
    for target, label in ((0.5, "cos_odd"), (1.0, "sin_odd")):
        j = int(np.argmin(np.abs(spec.sigmas - target)))
        assert abs(spec.sigmas[j] - target) <= 1e-10
        assert spec.block_labels[j] == label
    # eigenfunction content: the matched traces are the map coordinates
    tx, ty = half_problem.coordinate_traces()
    th = TWO_PI * np.arange(1024) / 1024
    for target, trace in ((0.5, tx), (1.0, ty)):
        j = int(np.argmin(np.abs(spec.sigmas - target)))
        a = evaluate(spec.eigen_traces[j], th)
        b = evaluate(trace, th)
        corr = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert corr >= 1.0 - 1e-9


def test_quadratic_eigenvalues_exact():
    # x^2 - y^2 + const and x y are eigenfunctions on the ellipse with
    # eigenvalues 4p/(1+p) and 1+p; both must appear in the pullback
    p = 0.6
    w = pullback_weight(conformal_map(p))
    spec = solve_spectrum_blocks(w, N=128, k_max=8, method="lapack",
                                 check=False)
    for target, label in ((4 * p / (1 + p), "cos_even"),
                          (1 + p, "sin_even")):
        j = int(np.argmin(np.abs(spec.sigmas - target)))
        assert abs(spec.sigmas[j] - target) <= 1e-10
        assert spec.block_labels[j] == label


def test_normalized_closed_forms():
    res = compute_indices(0.5)
    assert res.sigma_bar_low == pytest.approx(TWO_PI * math.sqrt(0.5),
                                              rel=1e-6)
    assert res.sigma_bar_high == pytest.approx(TWO_PI / math.sqrt(0.5),
                                               rel=1e-6)
    assert res.sigma_bar_low * res.sigma_bar_high == pytest.approx(
        4 * math.pi**2, rel=1e-6)
    assert res.map_residual <= 1e-8


def test_rotation_invariance(half_weight):
    # Moebius normalization freedom: a rotated pullback is isospectral
    s0 = solve_spectrum_blocks(half_weight, N=96, k_max=8, method="lapack",
                               check=False)
    s1 = solve_spectrum_blocks(half_weight.rotated(math.pi / 2), N=96,
                               k_max=8, method="lapack", check=False)
    assert np.max(np.abs(s0.sigmas - s1.sigmas)) <= 1e-7


@pytest.mark.parametrize("ratio,k2", [(1.05, 2), (2.0, 2), (4.2, 3)])
def test_k2_by_axis_ratio(ratio, k2):
    res = compute_indices(1.0 / ratio)
    assert res.k1 == 1
    assert res.k2 == k2


def test_k2_nondecreasing_toward_elongation():
    ranks = [compute_indices(p).k2 for p in (0.5, 0.3, 0.2)]
    assert ranks == sorted(ranks)
    assert ranks[-1] >= 3


def test_theta_star_bracket():
    est = estimate_theta_star(tolerance=0.5)
    assert not est.multivalued
    assert est.bracket_hi - est.bracket_lo <= 0.5 + 1e-12
    assert est.bracket_lo < 3.0 < est.bracket_hi
    assert 1.0 < est.bracket_lo and est.bracket_hi <= 4.0
    ratios = [r for r, _ in est.transitions]
    assert ratios == sorted(ratios)
    assert est.transitions[0][1] == 2
    assert est.transitions[-1][1] >= 3


def test_parameter_validation():
    for bad in (0.0, -0.2, 1.2, float("nan")):
        with pytest.raises(InputDomainError):
            conformal_map(bad)
    with pytest.raises(InputDomainError):
        conformal_map(0.5, M=8)
    with pytest.raises(InputDomainError):
        estimate_theta_star(tolerance=0.0)
    with pytest.raises(InputDomainError):
        estimate_theta_star(tolerance=0.1, lo=0.9)


def test_explicit_low_degree_raises():
    with pytest.raises(ResolutionError):
        conformal_map(0.2, M=16)


def test_stale_map_rejected(half_problem):
    stale = EllipseProblem(p=0.5, map_coeffs=half_problem.map_coeffs,
                           map_degree=half_problem.map_degree,
                           fit_residual=1e-3)
    with pytest.raises(DependencyError):
        pullback_weight(stale)


def test_index_result_order_invariant():
    with pytest.raises(InvariantViolation):
        IndexResult(p=0.5, k1=2, k2=1, sigma_bar_low=1.0, sigma_bar_high=2.0,
                    map_residual=0.0)


def test_indices_csv_roundtrip(tmp_path):
    rows = [compute_indices(p) for p in (0.8, 0.5)]
    path = indices_csv(rows, str(tmp_path / "indices.csv"))
    lines = open(path, encoding="ascii").read().splitlines()
    assert lines[0] == "p,k1,k2,sigma_bar_low,sigma_bar_high,map_residual"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[0]) == 0.8
    assert int(first[1]) == 1 and int(first[2]) == 2
    assert float(first[3]) == pytest.approx(rows[0].sigma_bar_low)
