import numpy as np
import pytest
from numpy.testing import assert_allclose

from cgo.solution import build_cgo
from checks.identity_check import green_fields
from core.errors import DomainError, GaugeError, PairingError, UnsupportedScenarioError
from geometry.boundary import BoundaryRegion
from geometry.calculus import differential
from geometry.fields import OneForm, ScalarField
from identity.functionals import (
    boundary_rhs,
    boundary_terms,
    identity_scale,
    integral_identity_lhs,
)
from identity.gauge import advection_certificate, conjugation_defect, gauge_matched_solution, gauge_potential
from identity.green import green_residual
from identity.scenarios import ScenarioPair
from recover.operator import certify_closed
from utils.presets import GAUGES, electric, gauge_shift, potential, scenario, vector_field


def _pair_solutions(chart, pair, h, b, cache=None):
    u1 = build_cgo(chart, pair.A1, pair.q1, h, 1, 0.5, b, cache=cache)
    u2 = build_cgo(chart, pair.A2, pair.q2, h, -1, 0.0, b, cache=cache)
    return u1, u2


def test_gauge_pair_needs_vanishing_potential(flat_chart):
    A = potential(flat_chart, 'smooth')
    q = electric(flat_chart, 'smooth-bump')
    with pytest.raises(GaugeError):
        ScenarioPair.gauge(flat_chart, A, q, ScalarField.constant(flat_chart, 0.1))
    pair = ScenarioPair.gauge(flat_chart, A, q, GAUGES['gauge-sine'](flat_chart))
    assert pair.is_gauge
    assert not np.any(pair.dq.values)


def test_gauge_potential_recovers_phi(chart):
    for name, build in GAUGES.items():
        phi = build(chart)
        recovered = gauge_potential(chart, differential(chart, phi))
        assert_allclose(recovered.values, phi.values, atol=1e-8, err_msg=name)


def test_gauge_potential_rejects_curl(chart):
    X1 = chart.mesh[0]
    zero = np.zeros(chart.shape)
    with pytest.raises(DomainError):
        gauge_potential(chart, OneForm(chart, zero, X1, zero))


def test_gauge_matched_solution_requires_boundary_zero(flat_chart, bump):
    A = potential(flat_chart, 'smooth')
    u1 = build_cgo(flat_chart, A, electric(flat_chart, 'zero'), 0.4, 1, 0.5, bump)
    with pytest.raises(GaugeError):
        gauge_matched_solution(u1, ScalarField.constant(flat_chart, 0.1))
    w2 = gauge_matched_solution(u1, GAUGES['gauge-sine'](flat_chart))
    boundary = flat_chart.boundary_mask
    assert_allclose(w2.W.values[boundary], u1.W.values[boundary])
    assert_allclose(w2.G.values[boundary], 0.0, atol=1e-12)


def test_gauge_conjugation(chart):
    A = potential(chart, 'smooth')
    q = electric(chart, 'smooth-bump')
    u, _ = green_fields(chart)
    assert conjugation_defect(chart, A, q, GAUGES['gauge-sine'](chart), u) < 5e-2


def test_green_residual_decreases_under_refinement(chart):
    residuals = []
    for sizes in ((9, 9, 5), (17, 17, 9)):
        refined = chart.refined(sizes)
        u, v = green_fields(refined)
        residuals.append(green_residual(refined, potential(refined, 'smooth'), electric(refined, 'smooth-bump'), u, v))
    assert residuals[1] < residuals[0]


def test_equal_signs_do_not_pair(flat_chart, bump):
    pair = scenario(flat_chart, 'gauge-sine')
    u1, _ = _pair_solutions(flat_chart, pair, 0.4, bump)
    with pytest.raises(PairingError):
        integral_identity_lhs(pair, u1, u1)


def test_boundary_terms_need_a_gauge_pair(flat_chart, bump):
    pair = scenario(flat_chart, 'generic-shear')
    u1, u2 = _pair_solutions(flat_chart, pair, 0.4, bump)
    region = BoundaryRegion.build(flat_chart)
    with pytest.raises(UnsupportedScenarioError):
        boundary_terms(pair, u1, u2, None, region, 0.4)


def test_exponentials_cancel(flat_chart, bump):
    pair = scenario(flat_chart, 'gauge-bubble')
    u1, u2 = _pair_solutions(flat_chart, pair, 0.4, bump)
    factored = integral_identity_lhs(pair, u1, u2)
    explicit = integral_identity_lhs(pair, u1, u2, explicit=True)
    assert abs(explicit - factored) <= 1e-8 * identity_scale(pair, u1, u2)


def test_gauge_identity_matches_boundary_terms(chart, bump, cache):
    pair = scenario(chart, 'gauge-sine')
    h = 0.4
    u1, u2 = _pair_solutions(chart, pair, h, bump, cache)
    w2 = gauge_matched_solution(u1, pair.phi)
    region = BoundaryRegion.build(chart, 1, 0.25)
    lhs = integral_identity_lhs(pair, u1, u2)
    rhs = boundary_rhs(pair, u1, u2, w2, region, h, selection='all')
    assert abs(lhs - rhs) <= 5e-2 * identity_scale(pair, u1, u2)
    with pytest.raises(PairingError):
        boundary_rhs(pair, u1, u2, w2, region, 0.2)


def test_magnetic_functional_separates_gauge_from_generic(chart):
    gauge = certify_closed(scenario(chart, 'gauge-sine').delta)
    generic = certify_closed(scenario(chart, 'generic-shear').delta)
    assert gauge.curl_norm < 1e-8
    assert generic.curl_norm > 1e-6
    assert gauge.max_relative <= 0.1
    assert gauge.max_relative < generic.max_relative


def test_advection_certificate_accepts_equal_fields(chart):
    X = vector_field(chart, 'swirl')
    certificate = advection_certificate(chart, X, X)
    assert certificate.psi_max == 0.0
    assert certificate.w_max == 0.0
    assert certificate.passed(1e-12)


def test_advection_certificate_rejects_gauge_shift(chart):
    X1 = vector_field(chart, 'swirl')
    X2 = X1 + gauge_shift(chart, 'gauge-sine')
    certificate = advection_certificate(chart, X1, X2)
    assert certificate.psi_boundary_max < 1e-12
    assert certificate.psi_max == pytest.approx(0.2, abs=1e-6)
    # w follows psi into the interior
    assert certificate.gap_max <= 0.25 * certificate.psi_max
    assert certificate.w_max >= 0.5 * certificate.psi_max
    assert not certificate.passed(1e-3)


def test_advection_certificate_follows_the_data(chart):
    X1 = vector_field(chart, 'swirl')
    X2 = X1 + gauge_shift(chart, 'gauge-sine')
    certificate = advection_certificate(chart, X1, X2, dq=ScalarField.constant(chart, 0.0))
    assert certificate.source_max == 0.0
    assert certificate.w_max < 1e-12
    assert certificate.passed(1e-3)
