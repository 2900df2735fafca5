import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import ParameterError
from geometry.fields import ScalarField
from geometry.quadrature import distance_to_faces
from mollify.kernel import DEFAULT_KERNEL, extend, mollify, regularize_one_form, smooth_cutoff
from mollify.rates import CORPUS, rate_study_Lp, regularization_rates
from utils.presets import build_chart, potential

TAUS = (0.2, 0.1, 0.05, 0.025)


@pytest.fixture(scope='module')
def rate_chart():
    return build_chart('flat-cylinder', (161, 9, 9))


def test_stencil_is_normalized_and_symmetric(chart):
    stencil = DEFAULT_KERNEL.stencil(0.2, chart.spacings)
    assert stencil.sum() == pytest.approx(1.0)
    assert_allclose(stencil, stencil[::-1, ::-1, ::-1])


def test_constants_are_preserved(chart):
    f = ScalarField.constant(chart, 2.5)
    assert_allclose(mollify(f, 0.2).values, 2.5)


def test_linear_functions_are_preserved_away_from_faces(chart):
    f = ScalarField.from_function(chart, lambda x1, r, th: 3.0 * x1 - 1.0)
    tau = 0.2
    X1 = chart.mesh[0]
    inside = (X1 > tau + 1e-9) & (X1 < 1.0 - tau - 1e-9)
    assert_allclose(mollify(f, tau).values[inside], f.values[inside], atol=1e-12)


def test_tau_limits(chart):
    f = ScalarField.constant(chart, 1.0)
    with pytest.raises(ParameterError):
        mollify(f, 0.0)
    with pytest.raises(ParameterError):
        mollify(f, 0.6)
    with pytest.raises(ParameterError):
        mollify(f, 0.2, tau_max=0.1)


def test_regularize_requires_one_form(chart):
    with pytest.raises(ParameterError):
        regularize_one_form(ScalarField.zeros(chart), 0.1)


def test_zero_extension_halves_face_values():
    out = extend(np.ones((4, 4)), (1, 1), (1.0, 1.0), 1.0, mode='zero')
    assert out.shape == (6, 6)
    assert out[0].max() == 0.0
    assert out[1, 1] == pytest.approx(0.25)
    assert out[1, 2] == pytest.approx(0.5)
    assert out[2, 2] == pytest.approx(1.0)


def test_cutoff_profile():
    d = np.array([0.0, 0.25, 0.5, 0.75, 1.0, 2.0])
    values = smooth_cutoff(d, 1.0)
    assert_allclose(values[:3], 1.0)
    assert 0.0 < values[3] < 1.0
    assert_allclose(values[4:], 0.0)


def test_kinked_corpus_rates(rate_chart):
    f = ScalarField.from_function(rate_chart, CORPUS['kinked'])
    bundle = rate_study_Lp(f, 2.0, TAUS)
    assert bundle['approximation'].passed
    assert bundle['second_derivative'].passed
    assert bundle['sup_k1'].passed


def test_rate_study_rejects_increasing_ladder(chart):
    f = ScalarField.from_function(chart, CORPUS['smooth'])
    with pytest.raises(ParameterError):
        rate_study_Lp(f, 2.0, (0.05, 0.1))


def test_rough_potential_regularization(rate_chart):
    bundle = regularization_rates(potential(rate_chart, 'rough-kink'), TAUS)
    assert set(bundle.reports) == {'approximation', 'second_covariant', 'sup_k1', 'sup_k2'}
    assert bundle['approximation'].passed
    assert bundle['approximation'].parameters == TAUS


def test_interior_region_excludes_collar(rate_chart):
    mask = distance_to_faces(rate_chart) > TAUS[0]
    assert mask.any() and not mask.all()
