"""Two-bubble family: series construction, eigenvalue trends, trial bounds."""

import math

import numpy as np
import pytest

from steklov_lab.errors import InputDomainError, ResolutionError
from steklov_lab.functional import FunctionalParams, h_value
from steklov_lab.trig import Parity, from_grid_values, values_on_grid
from steklov_lab.two_bubble import (asymptotics_sigma1, asymptotics_sigma2,
                                    family_report, family_sigmas,
                                    omega_eps_weight, rayleigh_upper_bounds,
                                    write_family_csv)

FOUR_PI = 4.0 * np.pi

# reference eigenvalues, frozen from an independent dense-quadrature solver
FROZEN = {
    0.1: (0.23983224713532, 0.92290498903057),
    0.03: (0.16061110955609, 0.99274716058951),
    0.01: (0.12104141989427, 0.99919861872109),
}


def _closed_form(theta, beta):
    k = beta * beta + 1.0
    return ((beta * beta - 1.0) / (k - 2.0 * beta * np.cos(theta))
            + (beta * beta - 1.0) / (k + 2.0 * beta * np.cos(theta)))


# ------------------------------------------------------------ construction

def test_point_structure_at_eps_one_tenth():
    point = omega_eps_weight(0.1)
    assert point.beta == pytest.approx(11.0 / 9.0, rel=1e-15)
    assert point.weight.length == pytest.approx(FOUR_PI, abs=1e-10)
    assert point.weight.symmetry_class is Parity.EVEN_BOTH
    cos = point.weight.density.cos_coeffs
    assert cos[0] == 2.0
    assert cos[2] == pytest.approx(4.0 * (9.0 / 11.0) ** 2, rel=1e-15)
    assert np.all(cos[1::2] == 0.0)


def test_truncated_series_reconstructs_the_closed_form():
    point = omega_eps_weight(0.9, N=9)
    theta = 2.0 * np.pi * np.arange(512) / 512
    series_vals = values_on_grid(point.weight.density, 512)
    assert np.max(np.abs(series_vals - _closed_form(theta, point.beta))) <= 1e-9


def test_series_coefficients_match_quadrature_projection():
    # independent route: FFT-project the closed form and compare coefficients
    eps = 0.05
    beta = 1.05 / 0.95
    theta = 2.0 * np.pi * np.arange(4096) / 4096
    projected = from_grid_values(_closed_form(theta, beta), 64)
    point = omega_eps_weight(eps)
    assert np.max(np.abs(projected.cos_coeffs
                         - point.weight.density.cos_coeffs[:65])) < 1e-12
    assert np.max(np.abs(projected.sin_coeffs)) < 1e-12


def test_input_validation():
    for bad in (0.0, 1.0, -0.2, math.nan):
        with pytest.raises(InputDomainError):
            omega_eps_weight(bad)
    with pytest.raises(ResolutionError):
        omega_eps_weight(0.01, N=100)
    with pytest.raises(ResolutionError):
        family_sigmas(5e-4)
    with pytest.raises(InputDomainError):
        asymptotics_sigma1([])
    with pytest.raises(InputDomainError):
        asymptotics_sigma1([0.01, 0.03])
    with pytest.raises(InputDomainError):
        asymptotics_sigma2([0.03, 0.03])


# ------------------------------------------------------------- eigenvalues

@pytest.mark.parametrize("eps", sorted(FROZEN, reverse=True))
def test_family_eigenvalues_match_frozen_reference(eps):
    s1, s2 = family_sigmas(eps)
    assert s1 == pytest.approx(FROZEN[eps][0], rel=1e-9)
    assert s2 == pytest.approx(FROZEN[eps][1], rel=1e-9)


def test_eigenvalue_trends_along_the_pinch():
    pairs = [family_sigmas(eps) for eps in (0.1, 0.03, 0.01)]
    sbar1 = [FOUR_PI * s1 for s1, _ in pairs]
    sbar2 = [FOUR_PI * s2 for _, s2 in pairs]
    assert sbar1[0] > sbar1[1] > sbar1[2]
    assert sbar2[0] < sbar2[1] < sbar2[2]
    assert all(s < FOUR_PI for s in sbar2)


def test_sigma1_report_single_point():
    report = asymptotics_sigma1([0.01])
    assert report.fitted_constant is None
    assert len(report.rows) == 1
    eps, sbar1, product = report.rows[0]
    assert eps == 0.01
    assert product == pytest.approx(sbar1 * math.log(100.0), rel=1e-14)
    assert 0.8 <= product / (2.0 * np.pi) <= 1.2


def test_sigma1_report_fit_runs_on_a_grid():
    report = asymptotics_sigma1([0.1, 0.03, 0.01])
    assert len(report.rows) == 3
    assert report.fitted_constant == pytest.approx(7.1326, abs=1e-3)


def test_sigma2_report_structure():
    report = asymptotics_sigma2([0.1, 0.03, 0.01])
    assert report.slope < 0.0
    for eps, sbar2, rate in report.rows:
        assert sbar2 < FOUR_PI
        assert rate == pytest.approx((FOUR_PI - sbar2) / eps, rel=1e-14)
    # the small-eps deficit is second order: sigma_2 stays within 15% of the
    # first-order prediction 1 - 4 eps simply because both are close to one
    _, s2 = family_sigmas(0.01)
    assert s2 == pytest.approx(1.0 - 4.0 * 0.01, rel=0.15)


# ------------------------------------------------------------ trial bounds

def test_rayleigh_bounds_bracket_the_solver():
    eps = 0.01
    rq1, rq2 = rayleigh_upper_bounds(eps)
    s1, s2 = family_sigmas(eps)
    assert s1 <= rq1
    assert s2 <= rq2
    assert 0.9 <= rq1 * 2.0 * math.log(1.0 / eps) <= 1.3
    assert rq2 <= 1.0 + 10.0 * eps


def test_rotation_trial_norm_matches_closed_form():
    # int f2^2 w dtheta = pi (1 + 4 eps^2/(1+eps^2)^2), derived by residues
    eps = 0.01
    rq2 = rayleigh_upper_bounds(eps)[1]
    expected = 1.0 / (1.0 + 4.0 * eps ** 2 / (1.0 + eps ** 2) ** 2)
    assert rq2 == pytest.approx(expected, rel=1e-9)


def test_family_witnesses_nonflat_infimum():
    # with s < 0 the family beats the degenerate-limit value t^{1/s}/(4 pi)
    s1, s2 = family_sigmas(0.01)
    params = FunctionalParams(-1.0, 0.9)
    E = h_value(params, FOUR_PI * s1, FOUR_PI * s2)
    assert E < (0.9 ** -1.0) / FOUR_PI


# ----------------------------------------------------------------- reports

def test_family_csv_report(tmp_path):
    rows = family_report([0.1, 0.05])
    assert [row["epsilon"] for row in rows] == [0.1, 0.05]
    path = write_family_csv(rows, str(tmp_path / "family.csv"))
    lines = (tmp_path / "family.csv").read_text(encoding="ascii").splitlines()
    assert lines[0] == ("epsilon,sigma_bar_1,sigma_bar_2,sigma_bar_1_log,"
                        "deficit_rate,rq_f1,rq_f2")
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[0]) == 0.1
    assert float(first[2]) == pytest.approx(FOUR_PI * FROZEN[0.1][1], rel=1e-9)
    assert path.endswith("family.csv")
