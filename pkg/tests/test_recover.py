import numpy as np
import pytest
from numpy.testing import assert_allclose

from cgo.amplitude import ThetaProfile
from core.errors import DomainError, ParameterError
from geometry.calculus import differential
from geometry.fields import OneForm, ScalarField
from geometry.quadrature import flat_weights
from identity.functionals import electric_data, polar_about
from recover.operator import (
    add_noise,
    assemble_data_operator,
    bump_family,
    certify_closed,
    injectivity_report,
    l_curve,
    l_curve_monotone,
    lambda_ladder,
    recover_q,
)
from utils.presets import GAUGES, build_chart, electric


@pytest.fixture(scope='module')
def small_chart():
    return build_chart('flat-cylinder', (5, 5, 3))


@pytest.fixture(scope='module')
def operator(small_chart):
    return assemble_data_operator(small_chart, lambda_ladder(-6.0, 6.0, 12))


def test_lambda_ladder():
    assert lambda_ladder(-1.0, 1.0, 3) == (-1.0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        lambda_ladder(0.0, 1.0, 0)


def test_bump_family_covers_window():
    family = bump_family((0.0, 1.2), 6)
    assert len(family) == 6
    assert family[0].center == pytest.approx(0.1)
    assert family[-1].center == pytest.approx(1.1)
    assert all(b.half_width == pytest.approx(0.2) for b in family)


def test_operator_is_injective_on_small_grid(operator, small_chart):
    report = injectivity_report(operator)
    assert report.unknowns == small_chart.node_count
    assert report.injective
    assert report.sigma_min > 0


def test_exact_recovery_with_truncated_svd(operator, small_chart):
    truth = electric(small_chart, 'smooth-bump')
    estimate, diagnostics = recover_q(operator, operator.apply(truth), 0.0, 'tsvd', truth)
    assert diagnostics['relative_error'] <= 1e-3
    assert_allclose(estimate.values.imag, 0.0)


def test_single_probe_collapses_rank(small_chart):
    bump = ThetaProfile(kind='bump', center=0.0, half_width=0.4, arc=small_chart.theta_range)
    op = assemble_data_operator(small_chart, [0.0], b_family=[bump])
    report = injectivity_report(op)
    assert not report.injective
    assert report.sigma_min == 0.0
    assert report.condition == float('inf')


def test_regularization_arguments(operator, small_chart):
    data = operator.apply(electric(small_chart, 'smooth-bump'))
    with pytest.raises(ParameterError):
        recover_q(operator, data, -1.0)
    with pytest.raises(ParameterError):
        recover_q(operator, data, 1e-3, method='landweber')


def test_tikhonov_l_curve_is_monotone(operator, small_chart):
    truth = electric(small_chart, 'smooth-bump')
    noisy = add_noise(operator.apply(truth), 0.01, seed=4)
    rows = l_curve(operator, noisy, (1.0, 1e-4, 1e-2, 1e-6), truth=truth)
    assert [row['reg'] for row in rows] == [1e-6, 1e-4, 1e-2, 1.0]
    assert l_curve_monotone(rows)


def test_noise_level_and_seed():
    data = np.arange(1, 9, dtype=complex)
    first = add_noise(data, 0.05, seed=2)
    assert np.array_equal(first, add_noise(data, 0.05, seed=2))
    assert not np.array_equal(first, add_noise(data, 0.05, seed=3))
    assert np.linalg.norm(first - data) == pytest.approx(0.05 * np.linalg.norm(data))


def test_electric_data_about_origin(small_chart):
    dq = electric(small_chart, 'smooth-bump')
    b = ThetaProfile(kind='bump', center=0.0, half_width=0.4, arc=small_chart.theta_range)
    X1, R, TH = small_chart.mesh
    direct = np.sum(flat_weights(small_chart) * small_chart.warp * b(TH) * np.exp(1j * 1.5 * (X1 + 1j * R))
                    * dq.values)
    assert electric_data(dq, 1.5, b) == pytest.approx(direct)


def test_polar_centre_must_lie_outside_the_section(small_chart):
    with pytest.raises(DomainError):
        polar_about(small_chart, 2.0)
    r_omega, _ = polar_about(small_chart, -0.6)
    assert np.min(r_omega) > 1.0


def test_closure_certificate(chart):
    phi = GAUGES['gauge-sine'](chart)
    closed = certify_closed(differential(chart, phi))
    assert closed.curl_norm < 1e-8
    zero = np.zeros(chart.shape)
    sheared = certify_closed(OneForm(chart, zero, chart.mesh[0], zero))
    assert sheared.curl_norm == pytest.approx(1.0)
    assert not sheared.passed(1e-6, 1e-2)
