import pytest

from core.errors import ParameterError
from core.report import ReportBundle, ladder


def test_decreasing_trend():
    report = ladder('approximation', 'o(tau)', (0.2, 0.1, 0.05), (0.02, 0.007, 0.002), target_exponent=1.0)
    assert report.normalized_ratios == pytest.approx((0.1, 0.07, 0.04))
    assert report.passed
    stalled = ladder('approximation', 'o(tau)', (0.2, 0.1, 0.05), (0.02, 0.012, 0.007), target_exponent=1.0)
    assert not stalled.passed


def test_zero_norms_pass_a_decreasing_trend():
    assert ladder('phase', 'o(tau)', (0.2, 0.1), (0.0, 0.0), target_exponent=1.0).passed


def test_bounded_trend():
    report = ladder('sup', 'O(1/tau)', (0.2, 0.1, 0.05), (5.0, 15.0, 30.0), target_exponent=-1.0,
                    trend='bounded', bound_factor=2.0)
    assert report.normalized_ratios == pytest.approx((1.0, 1.5, 1.5))
    assert report.passed
    assert not ladder('sup', 'O(1)', (0.2, 0.1), (1.0, 2.5), trend='bounded').passed


def test_bounded_below_trend():
    report = ladder('carleman', 'ratio', (0.05, 0.025), (0.5, 0.02), trend='bounded_below', threshold=0.01,
                    parameter_name='h')
    assert report.passed
    assert report.header() == ('h', 'norm', 'normalized_ratio')
    assert report.verdict()['threshold'] == 0.01


def test_fitted_exponent():
    report = ladder('slope', 'h^2', (0.4, 0.2, 0.1), (0.16, 0.04, 0.01))
    assert report.fitted_exponent == pytest.approx(2.0)
    assert ladder('flat', 'zero', (0.4, 0.2), (0.0, 0.0)).verdict()['fitted_exponent'] is None


def test_invalid_ladders():
    with pytest.raises(ParameterError):
        ladder('bad', 'increasing', (0.1, 0.2), (1.0, 1.0))
    with pytest.raises(ParameterError):
        ladder('bad', 'length', (0.2, 0.1), (1.0,))
    with pytest.raises(ParameterError):
        ladder('bad', 'negative', (0.2, 0.1), (1.0, -1.0))
    with pytest.raises(ParameterError):
        ladder('bad', 'trend', (0.2, 0.1), (1.0, 1.0), trend='oscillating')


def test_bundle_failures():
    good = ladder('good', 'o(tau)', (0.2, 0.1), (0.02, 0.005), target_exponent=1.0)
    bad = ladder('bad', 'o(tau)', (0.2, 0.1), (0.02, 0.02), target_exponent=1.0)
    bundle = ReportBundle(name='rates', reports={'good': good, 'bad': bad})
    assert len(bundle) == 2
    assert not bundle.passed
    assert bundle.failures() == ['bad']
