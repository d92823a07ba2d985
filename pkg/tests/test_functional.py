"""Eigenvalue functional h, its subgradient, and the phase classifier."""

import numpy as np
import pytest

from steklov_lab.errors import InputDomainError
from steklov_lab.functional import (FunctionalParams, PhaseCall, evaluate_E,
                                    h_partials, h_value,
                                    mass_fraction_targets, phase_classify,
                                    subgradient)
from steklov_lab.steklov import BoundaryWeight, solve_spectrum
from steklov_lab.trig import TrigSeries, from_grid_values, values_on_grid

TWO_PI = 2.0 * np.pi


def _weight_from_log_values(v_vals, n_modes=32):
    return BoundaryWeight.from_log(from_grid_values(v_vals, n_modes))


def test_h_value_flat_pair_is_one_over_pi():
    assert h_value(FunctionalParams(1.0, 1.0), TWO_PI, TWO_PI) == pytest.approx(
        1.0 / np.pi, rel=1e-14)


def test_h_value_balanced_split_gives_sqrt_t():
    t = 7.0
    val = h_value(FunctionalParams(1.0, t), TWO_PI / np.sqrt(t),
                  TWO_PI * np.sqrt(t))
    assert val == pytest.approx(2.0 * np.sqrt(t) / TWO_PI, rel=1e-14)


def test_h_value_negative_s_substitution():
    assert h_value(FunctionalParams(-1.0, 1.0), 1.0, 1.0) == pytest.approx(0.5)


def test_h_value_rejects_nonpositive_eigenvalues():
    with pytest.raises(InputDomainError):
        h_value(FunctionalParams(1.0, 1.0), 0.0, 1.0)
    with pytest.raises(InputDomainError):
        h_value(FunctionalParams(1.0, 1.0), 1.0, -2.0)


def test_params_validation():
    with pytest.raises(InputDomainError):
        FunctionalParams(0.0, 1.0)
    with pytest.raises(InputDomainError):
        FunctionalParams(1.0, 0.0)
    with pytest.raises(InputDomainError):
        FunctionalParams(np.inf, 1.0)


def test_h_homogeneity_degree_minus_one(rng):
    for _ in range(20):
        s = rng.uniform(-3.0, 3.0)
        if abs(s) < 0.1:
            s = 0.5
        params = FunctionalParams(s, rng.uniform(0.1, 10.0))
        a, b = rng.uniform(0.5, 8.0, size=2)
        lam = rng.uniform(0.2, 5.0)
        assert h_value(params, lam * a, lam * b) == pytest.approx(
            h_value(params, a, b) / lam, rel=1e-12)


def test_partial_ratio_identity(rng):
    for s in (1.0, 2.0, -1.0, -0.5):
        params = FunctionalParams(s, 3.0)
        a, b = 2.0, 5.0
        d1, d2 = h_partials(params, a, b)
        assert d1 <= 0.0 and d2 <= 0.0
        assert d2 / d1 == pytest.approx(3.0 * (b / a) ** (-s - 1.0), rel=1e-12)


def test_mass_fractions_sum_to_one(rng):
    for _ in range(10):
        s = rng.uniform(-2.0, 2.0)
        if abs(s) < 0.1:
            s = -0.7
        params = FunctionalParams(s, rng.uniform(0.2, 9.0))
        m0, m12 = mass_fraction_targets(params, rng.uniform(0.5, 5.0),
                                        rng.uniform(0.5, 5.0))
        assert m0 + m12 == pytest.approx(1.0, abs=1e-13)


def test_evaluate_E_flat_examples():
    flat = BoundaryWeight.from_density(TrigSeries.constant(1.0))
    val1, spec = evaluate_E(flat, FunctionalParams(1.0, 1.0), N=32)
    assert val1 == pytest.approx(1.0 / np.pi, rel=1e-12)
    assert spec.sigmas[1] == pytest.approx(1.0, abs=1e-12)
    val3, _ = evaluate_E(flat, FunctionalParams(1.0, 3.0), N=32)
    assert val3 == pytest.approx(2.0 / np.pi, rel=1e-12)


def test_evaluate_E_weight_scale_invariance():
    base = TrigSeries.from_cos([1.0, 0.0, 0.25])
    w1 = BoundaryWeight.from_density(base)
    w2 = BoundaryWeight.from_density(TrigSeries(3.7 * base.cos_coeffs,
                                                3.7 * base.sin_coeffs))
    params = FunctionalParams(1.0, 2.0)
    e1, _ = evaluate_E(w1, params, N=48)
    e2, _ = evaluate_E(w2, params, N=48)
    assert e1 == pytest.approx(e2, rel=1e-10)


def test_subgradient_vanishes_at_flat_disk():
    flat = BoundaryWeight.from_density(TrigSeries.constant(1.0))
    spec = solve_spectrum(flat, N=32, k_max=6)
    psi = subgradient(flat, spec, FunctionalParams(1.0, 1.0))
    assert np.max(np.abs(psi.direction.cos_coeffs)) < 1e-12
    assert np.max(np.abs(psi.direction.sin_coeffs)) < 1e-12


def test_subgradient_integrates_to_zero_against_weight(rng):
    for _ in range(5):
        coeffs = np.zeros(7)
        coeffs[0] = 1.0
        coeffs[2] = rng.uniform(-0.25, 0.25)
        coeffs[4] = rng.uniform(-0.15, 0.15)
        coeffs[6] = rng.uniform(-0.05, 0.05)
        w = BoundaryWeight.from_density(TrigSeries.from_cos(coeffs))
        spec = solve_spectrum(w, N=48, k_max=6)
        psi = subgradient(w, spec, FunctionalParams(1.0, 2.0))
        P = 4096
        wv = values_on_grid(w.density, P)
        pv = values_on_grid(psi.direction, P)
        assert abs(np.mean(pv * wv) * TWO_PI) < 1e-10


def test_subgradient_matches_finite_differences(rng):
    """Central finite differences of E along random even_both directions.

    Both eigenvalues of 1 + 0.3 cos(2 theta) are simple, so E is smooth there
    and the subgradient is the gradient: dE = int psi dv w dtheta.
    """
    P = 1 << 12
    th = TWO_PI * np.arange(P) / P
    v0 = np.log(1.0 + 0.3 * np.cos(2.0 * th))
    params = FunctionalParams(1.0, 2.0)
    w = _weight_from_log_values(v0)
    spec = solve_spectrum(w, N=64, k_max=4)
    psi = subgradient(w, spec, params)
    psi_vals = values_on_grid(psi.direction, P)
    w_vals = values_on_grid(w.density, P)
    h = 1e-5
    for _ in range(10):
        dv = (rng.uniform(-1.0, 1.0) * np.cos(2.0 * th)
              + rng.uniform(-1.0, 1.0) * np.cos(4.0 * th)
              + rng.uniform(-1.0, 1.0) * np.cos(6.0 * th))
        e_plus, _ = evaluate_E(_weight_from_log_values(v0 + h * dv), params, N=64)
        e_minus, _ = evaluate_E(_weight_from_log_values(v0 - h * dv), params, N=64)
        fd = (e_plus - e_minus) / (2.0 * h)
        analytic = float(np.mean(psi_vals * dv * w_vals) * TWO_PI)
        assert fd == pytest.approx(analytic, rel=1e-4)


@pytest.mark.parametrize("t", [2.0, 0.5])
def test_subgradient_descends_at_multiplet(t):
    """-psi descends even where sigma_1 = sigma_2 is an exact double.

    A quarter-turn symmetric weight forces the cos-odd and sin-odd blocks to
    share their spectrum, so the first two eigenvalues coincide to machine
    precision and the averaged subdifferential element is exercised.
    """
    w = BoundaryWeight.from_density(TrigSeries.from_cos([1.0, 0, 0, 0, 0.3]))
    spec = solve_spectrum(w, N=64, k_max=6)
    assert spec.sigmas[2] - spec.sigmas[1] < 1e-10 * spec.sigmas[1]
    params = FunctionalParams(1.0, t)
    psi = subgradient(w, spec, params)
    P = 1 << 12
    v0 = np.log(values_on_grid(w.density, P))
    dv = values_on_grid(psi.direction, P)
    e0, _ = evaluate_E(_weight_from_log_values(v0, 48), params, N=96)
    descended = False
    lam = 0.5
    for _ in range(25):
        e_try, _ = evaluate_E(_weight_from_log_values(v0 - lam * dv, 48),
                              params, N=96)
        if e_try < e0:
            descended = True
            break
        lam *= 0.5
    assert descended


def test_phase_classify_examples():
    assert phase_classify(FunctionalParams(1.0, 5.0), 4.0) is PhaseCall.NONPLANAR_FORCED
    assert phase_classify(FunctionalParams(-1.0, 1.0), 3.0) is PhaseCall.NONPLANAR_FORCED
    assert phase_classify(FunctionalParams(1.0, 0.5), 3.0) is PhaseCall.INCONCLUSIVE
    assert phase_classify(FunctionalParams(1.0, 2.0), 3.0) is PhaseCall.FLAT_EXCLUDED
    assert phase_classify(FunctionalParams(-1.0, 0.5), 3.0) is PhaseCall.ELONGATED_ELLIPSE_EXCLUDED


def test_phase_classify_threshold_is_strict_for_positive_s():
    # t = theta_star ** s exactly: not above the threshold, so only t > 1 applies
    assert phase_classify(FunctionalParams(1.0, 3.0), 3.0) is PhaseCall.FLAT_EXCLUDED


def test_phase_classify_rejects_bad_theta_star():
    with pytest.raises(InputDomainError):
        phase_classify(FunctionalParams(1.0, 2.0), 5.0)
    with pytest.raises(InputDomainError):
        phase_classify(FunctionalParams(1.0, 2.0), 1.0)
