import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import ParameterError, WindowError
from dbar.cauchy import CauchyKernelGrid, bump_oracle, cauchy_transform, dbar, refinement_study
from dbar.phase import pair_phase, phase_correction, window_pad
from geometry.fields import OneForm
from utils.presets import potential


def test_kernel_self_term_is_zero(cache):
    kernel = CauchyKernelGrid.same_grid((5, 5), (0.1, 0.1), cache)
    assert kernel.values.shape == (9, 9)
    assert kernel.values[4, 4] == 0
    assert kernel.values[5, 4] == pytest.approx(1.0 / (np.pi * 0.1))
    assert kernel.values[4, 5] == pytest.approx(1.0 / (np.pi * 0.1j))


def test_kernel_is_cached(cache):
    first = CauchyKernelGrid.same_grid((7, 7), (0.2, 0.2), cache)
    second = CauchyKernelGrid.same_grid((7, 7), (0.2, 0.2), cache)
    assert first.values is second.values


def test_rhs_must_fit_window(cache):
    kernel = CauchyKernelGrid.same_grid((5, 5), (0.1, 0.1), cache)
    touching = np.zeros((5, 5))
    touching[0, 2] = 1.0
    with pytest.raises(WindowError):
        cauchy_transform(touching, kernel)
    with pytest.raises(WindowError):
        cauchy_transform(np.zeros((4, 5)), kernel)
    assert not np.any(cauchy_transform(np.zeros((5, 5)), kernel))


def test_dbar_of_conjugate_coordinate():
    axis = np.linspace(-1.0, 1.0, 11)
    X, Y = np.meshgrid(axis, axis, indexing='ij')
    d = axis[1] - axis[0]
    assert_allclose(dbar(X - 1j * Y, (d, d)), 1.0, atol=1e-12)
    assert_allclose(dbar(X + 1j * Y, (d, d)), 0.0, atol=1e-12)


def test_bump_oracle_vanishes_outside_radius():
    x = np.array([0.0, 0.5, 0.95])
    F, dF = bump_oracle(x, np.zeros(3), radius=0.9)
    assert F[0] == pytest.approx(np.exp(-1.0))
    assert F[2] == 0 and dF[2] == 0


def test_cauchy_transform_converges_at_first_order(cache):
    study = refinement_study((33, 65, 129), cache=cache)
    assert study.passed(1.7)
    assert all(r >= 1.7 for r in study.error_ratios)
    assert study.sup_errors[-1] < study.sup_errors[0]


def test_phase_correction_of_zero_potential(chart):
    assert not np.any(phase_correction(OneForm.zeros(chart), 1).values)


def test_phase_correction_arguments(chart):
    A = potential(chart, 'smooth')
    with pytest.raises(ParameterError):
        phase_correction(A, 0)
    with pytest.raises(ParameterError):
        phase_correction(A, 1, extension='periodic')
    with pytest.raises(ParameterError):
        phase_correction(A, 1, width=0.0)


def test_phase_correction_solves_dbar(chart, cache):
    A = potential(chart, 'smooth')
    phi = phase_correction(A, 1, cache=cache).values
    rhs = -0.5 * (A.component_x1 + 1j * A.component_r)
    residual = dbar(phi, chart.spacings[:2]) - rhs
    inner = (slice(2, -2), slice(2, -2), slice(None))
    assert np.max(np.abs(residual[inner])) < 0.25 * np.max(np.abs(rhs))


def test_sign_flips_the_phase(chart, cache):
    A = potential(chart, 'smooth')
    assert_allclose(phase_correction(A, -1, cache=cache).values, -phase_correction(A, 1, cache=cache).values)


def test_pair_phase_of_equal_potentials(chart):
    A = potential(chart, 'rough-kink')
    assert not np.any(pair_phase(A, A).values)


def test_window_pad_covers_extension(chart):
    pad = window_pad(chart, 0.5)
    assert pad[0] * chart.spacings[0] > 0.5
    assert pad[1] * chart.spacings[1] > 0.5
