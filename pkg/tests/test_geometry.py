import numpy as np
import pytest
from numpy.testing import assert_allclose

from cgo.amplitude import eikonal_residual
from core.errors import ChartMismatchError, ConfigurationError, DomainError
from geometry.boundary import BoundaryRegion, integrate_boundary
from geometry.calculus import (
    codifferential,
    differential,
    divergence,
    flat,
    inner,
    laplace_beltrami,
    laplace_rows,
    magnetic_apply,
    sharp,
)
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, VectorField
from geometry.quadrature import integrate_volume, lp_norm
from geometry.transforms import advection_apply, advection_to_magnetic, log_polar_map
from utils.presets import CHARTS, build_chart, potential, vector_field


def test_coarse_grid_rejected():
    with pytest.raises(ConfigurationError):
        CylinderChart.build((0, 1), (1, 3), (-0.5, 0.5), (2, 9, 9))


def test_centre_inside_transversal_disk_rejected():
    with pytest.raises(DomainError):
        CylinderChart.build((0, 1), (0.0, 3), (-0.5, 0.5), (9, 9, 9))


def test_fields_on_different_charts_do_not_mix(flat_chart, chart):
    with pytest.raises(ChartMismatchError):
        ScalarField.zeros(flat_chart) + ScalarField.zeros(chart)


@pytest.mark.parametrize('name', sorted(CHARTS))
def test_complex_phase_is_eikonal(name):
    assert eikonal_residual(build_chart(name, (9, 9, 5))) <= 1e-12


def test_volume_of_flat_chart(chart):
    # int r dr dtheta dx1 over [0,1] x [1,3] x [-pi/6, pi/6]; trapezoid is exact for r
    volume = integrate_volume(chart, np.ones(chart.shape))
    assert_allclose(volume.real, 4.0 * np.pi / 3.0, rtol=1e-12)


def test_inner_is_bilinear(warped_chart):
    A = potential(warped_chart, 'smooth') * (1 + 2j)
    B = potential(warped_chart, 'rough-kink')
    assert_allclose(inner(warped_chart, A, B).values, inner(warped_chart, B, A).values)
    assert_allclose(inner(warped_chart, A * 1j, B).values, 1j * inner(warped_chart, A, B).values)


def test_sharp_and_flat_are_inverse(warped_chart):
    X = vector_field(warped_chart, 'swirl')
    back = sharp(warped_chart, flat(warped_chart, X))
    for a, b in zip(back, X):
        assert_allclose(a, b, atol=1e-14)


def test_laplacian_of_linear_function_in_x1_vanishes(chart):
    u = ScalarField.from_function(chart, lambda x1, r, th: 2.0 * x1 + 1.0)
    assert np.max(np.abs(laplace_beltrami(chart, u).values)) < 1e-10


def test_laplacian_rows_match_compact_stencil(warped_chart):
    u = ScalarField.from_function(warped_chart, lambda x1, r, th: np.sin(x1) * r ** 2 * np.cos(th))
    rows = laplace_rows(warped_chart)
    expected = laplace_beltrami(warped_chart, u).values[warped_chart.interior_mask]
    assert_allclose(rows @ u.values.ravel(), expected, rtol=1e-10, atol=1e-10)


def test_magnetic_operator_annihilates_plane_wave(chart):
    # with A = dx1 and q = 0 the annihilated wave is exp(-i x1)
    zero = np.zeros(chart.shape)
    A = OneForm(chart, np.ones(chart.shape), zero, zero)
    u = ScalarField.from_function(chart, lambda x1, r, th: np.exp(-1j * x1))
    residual = magnetic_apply(chart, A, ScalarField.zeros(chart), u)
    assert np.max(np.abs(residual.values[chart.interior_mask])) < 5e-3

    wrong = ScalarField.from_function(chart, lambda x1, r, th: np.exp(1j * x1))
    assert np.max(np.abs(magnetic_apply(chart, A, ScalarField.zeros(chart), wrong).values)) > 1.0


def _magnetic_error(sizes):
    chart = build_chart('flat-cylinder', sizes)
    X1, R, TH = chart.mesh
    A = OneForm(chart, X1, np.zeros(chart.shape), 0.5 * R ** 2)
    u = ScalarField(chart, np.exp(X1) * R ** 2 * np.cos(TH))
    # d*A = -1, <A, A> = x1^2 + r^2/4, <A, du> = x1 u_x1 + u_theta / 2
    E, C, S = np.exp(X1), np.cos(TH), np.sin(TH)
    exact = (-E * C * (R ** 2 + 3.0) - 1j * E * R ** 2 * C - 2j * X1 * E * R ** 2 * C + 1j * E * R ** 2 * S
             + (X1 ** 2 + R ** 2 / 4.0) * E * R ** 2 * C)
    residual = magnetic_apply(chart, A, ScalarField.zeros(chart), u).values - exact
    interior = chart.interior_mask
    return np.max(np.abs(residual[interior])) / np.max(np.abs(exact[interior]))


def test_magnetic_operator_converges_for_smooth_potential():
    errors = [_magnetic_error(sizes) for sizes in ((9, 9, 5), (17, 17, 9), (33, 33, 17))]
    assert errors[0] < 0.05
    for coarse, fine in zip(errors, errors[1:]):
        assert fine < 0.5 * coarse


def test_divergence_is_minus_codifferential(warped_chart):
    X = vector_field(warped_chart, 'swirl')
    assert_allclose(divergence(warped_chart, X).values, -codifferential(warped_chart, flat(warped_chart, X)).values)


def test_boundary_quadrature_area(chart):
    region = BoundaryRegion.build(chart)
    # two annular sectors plus the outer, inner and two flat lateral faces
    sector = 0.5 * (9.0 - 1.0) * np.pi / 3.0
    expected = 2 * sector + 3.0 * np.pi / 3.0 + 1.0 * np.pi / 3.0 + 2 * 2.0
    assert_allclose(region.area('all'), expected, rtol=1e-12)
    assert region.area('plus') + region.area('minus') == pytest.approx(region.area('all'))
    assert region.area('gamma') + region.area('outside_gamma') == pytest.approx(region.area('all'))
    assert_allclose(integrate_boundary(region, np.ones(chart.shape)), expected, rtol=1e-12)


def test_log_polar_map_matches_warped_laplacian():
    points = [[0.3, 0.2, 1.0], [1.0, -0.5, 0.8], [0.1, 0.6, 0.3]]
    samples = log_polar_map(points, 'x1**2*x3 + x2*x3**3')
    assert samples.laplacian_error <= 1e-6
    assert samples.metric_error <= 1e-6
    assert_allclose(samples.warp, np.sum(np.asarray(points) ** 2, axis=1), rtol=1e-12)


def test_log_polar_map_rejects_origin():
    with pytest.raises(DomainError):
        log_polar_map([[0.0, 0.0, 0.0]])


def test_advection_operator_equals_magnetic_form(warped_chart):
    X = vector_field(warped_chart, 'swirl')
    A, q = advection_to_magnetic(warped_chart, X)
    u = ScalarField.from_function(warped_chart, lambda x1, r, th: np.exp(x1) * np.cos(r) + 0.5j * th)
    lhs = advection_apply(warped_chart, X, u)
    rhs = magnetic_apply(warped_chart, A, q, u)
    assert lp_norm(warped_chart, lhs - rhs) <= 1e-10 * lp_norm(warped_chart, lhs)


def test_advection_field_must_be_real(chart):
    X = vector_field(chart, 'unit-x1') * 1j
    with pytest.raises(DomainError):
        advection_to_magnetic(chart, X)


def test_differential_of_x1_is_exact(warped_chart):
    u = ScalarField.from_function(warped_chart, lambda x1, r, th: 3.0 * x1)
    du = differential(warped_chart, u)
    assert_allclose(du.component_x1, 3.0)
    assert_allclose(du.component_r, 0.0, atol=1e-12)
