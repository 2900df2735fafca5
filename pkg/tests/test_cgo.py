import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cgo.amplitude import (
    ThetaProfile,
    build_amplitude,
    check_support,
    holomorphic_residual,
    regularization_scale,
)
from cgo.remainder import remainder_source
from cgo.solution import LEDGER, build_cgo, cgo_ladder, manufactured_remainder
from core.errors import NumericError, ParameterError, SupportError
from geometry.calculus import laplace_beltrami
from geometry.fields import OneForm
from geometry.quadrature import lp_norm
from utils.presets import electric, potential


def test_regularization_scale():
    assert regularization_scale(0.25, 0.25) == pytest.approx(0.125)
    for h in (0.0, -0.1, 0.6):
        with pytest.raises(ParameterError):
            regularization_scale(h)
    with pytest.raises(ParameterError):
        regularization_scale(0.2, 0.0)


def test_profile_support(flat_chart, bump):
    values = check_support(flat_chart, bump)
    assert values[0] == 0 and values[-1] == 0
    check_support(flat_chart, ThetaProfile(kind='trig', mode=2, arc=flat_chart.theta_range))
    with pytest.raises(SupportError):
        check_support(flat_chart, ThetaProfile(kind='constant'))
    with pytest.raises(SupportError):
        check_support(flat_chart, ThetaProfile(kind='bump', center=0.4, half_width=0.4))
    with pytest.raises(ParameterError):
        ThetaProfile(kind='gauss')(0.0)


def test_holomorphic_factor_is_exact(flat_chart):
    assert holomorphic_residual(flat_chart, 2.5) == 0.0


def test_amplitude_without_potential_has_no_phase(flat_chart, bump):
    a, phi = build_amplitude(flat_chart, OneForm.zeros(flat_chart), 0.2, 1, 1.0, bump)
    assert not np.any(phi.values)
    assert np.all(np.abs(a.values[:, :, 0]) == 0)


def test_manufactured_remainder(flat_chart, cache):
    A = potential(flat_chart, 'rough-kink')
    q = electric(flat_chart, 'smooth-bump')
    for sign in (1, -1):
        error, _ = manufactured_remainder(flat_chart, A, q, 0.2, sign, cache=cache)
        assert error <= 1e-6


def test_source_rejects_unpaired_tau(flat_chart, bump):
    A = potential(flat_chart, 'smooth')
    q = electric(flat_chart, 'smooth-bump')
    a, _ = build_amplitude(flat_chart, A, 0.2, 1, 1.0, bump)
    with pytest.raises(ParameterError):
        remainder_source(flat_chart, A, A, q, a, 0.2, tau=0.3)


def test_cgo_ledger_and_ladder(flat_chart, bump, cache):
    A = potential(flat_chart, 'rough-kink')
    q = electric(flat_chart, 'smooth-bump')
    solutions = [build_cgo(flat_chart, A, q, h, 1, 1.0, bump, cache=cache) for h in (0.4, 0.2)]
    for solution in solutions:
        assert set(LEDGER) <= set(solution.norm_ledger)
        assert solution.norm_ledger['relative_residual'] < 1e-8
        assert solution.tau == pytest.approx(regularization_scale(solution.h))
    bundle = cgo_ladder(solutions)
    assert set(bundle.reports) == set(LEDGER) | {'source_l2'}
    assert bundle['a_sup'].parameters == (0.4, 0.2)


def test_transport_defect_is_small_without_potential(chart, bump, cache):
    zero = OneForm.zeros(chart)
    solution = build_cgo(chart, zero, electric(chart, 'zero'), 0.2, 1, 1.0, bump, cache=cache)
    assert solution.norm_ledger['transport_l2'] < 0.05 * solution.norm_ledger['a_l2']


def test_explicit_field_overflow(flat_chart, bump, cache):
    A = potential(flat_chart, 'smooth')
    solution = build_cgo(flat_chart, A, electric(flat_chart, 'zero'), 0.4, 1, 0.0, bump, cache=cache)
    assert np.all(np.isfinite(solution.field().values))
    with pytest.raises(NumericError):
        dataclasses.replace(solution, h=1e-3).field()


def test_bad_sign(flat_chart, bump):
    A = potential(flat_chart, 'smooth')
    with pytest.raises(ParameterError):
        build_cgo(flat_chart, A, electric(flat_chart, 'zero'), 0.2, 2, 1.0, bump)


def test_source_without_coefficients_is_the_laplacian(chart, bump, cache):
    h = 0.2
    zero = OneForm.zeros(chart)
    a, _ = build_amplitude(chart, zero, h, 1, 1.0, bump, cache=cache)
    v, norms = remainder_source(chart, zero, zero, electric(chart, 'zero'), a, h, tau=regularization_scale(h),
                                cache=cache)
    expected = h ** 2 * laplace_beltrami(chart, a).values
    assert_allclose(v.values, expected, rtol=1e-12, atol=1e-14 * np.max(np.abs(expected)))
    for term in ('cross', 'regularization', 'codifferential', 'potential'):
        assert norms[term] == 0.0
    assert norms['transport'] > 0.0


def test_transport_defect_is_opt_in(chart, bump, cache):
    h = 0.2
    zero = OneForm.zeros(chart)
    a, _ = build_amplitude(chart, zero, h, 1, 1.0, bump, cache=cache)
    q = electric(chart, 'zero')
    plain, _ = remainder_source(chart, zero, zero, q, a, h, cache=cache)
    full, norms = remainder_source(chart, zero, zero, q, a, h, include_transport=True, cache=cache)
    assert lp_norm(chart, full - plain) == pytest.approx(norms['transport'])


def test_smooth_potential_has_no_regularization_term(flat_chart, bump, cache):
    A = potential(flat_chart, 'smooth')
    a, _ = build_amplitude(flat_chart, A, 0.2, 1, 1.0, bump, cache=cache)
    _, norms = remainder_source(flat_chart, A, A, electric(flat_chart, 'smooth-bump'), a, 0.2, cache=cache)
    assert norms['regularization'] == 0.0
    assert norms['cross'] > 0.0


def test_opposite_signs_negate_the_phase_for_real_potential(flat_chart, bump, cache):
    A = potential(flat_chart, 'smooth')
    zero = OneForm.zeros(flat_chart)
    a_plus, phi_plus = build_amplitude(flat_chart, A, 0.2, 1, 0.0, bump, cache=cache)
    a_minus, phi_minus = build_amplitude(flat_chart, A, 0.2, -1, 0.0, bump, cache=cache)
    assert np.max(np.abs(phi_plus.values)) > 0
    assert_allclose(phi_minus.values, -phi_plus.values, atol=1e-14)
    # the phase factors cancel in the product of the two amplitudes
    z_plus, _ = build_amplitude(flat_chart, zero, 0.2, 1, 0.0, bump, cache=cache)
    z_minus, _ = build_amplitude(flat_chart, zero, 0.2, -1, 0.0, bump, cache=cache)
    assert_allclose((a_plus * a_minus).values, (z_plus * z_minus).values, rtol=1e-10, atol=1e-14)
