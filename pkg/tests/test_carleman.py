import numpy as np
import pytest
from numpy.testing import assert_allclose

from carleman.estimates import (
    boundary_samples,
    carleman_check_boundary,
    carleman_check_interior,
    interior_samples,
    perturbation_terms,
)
from carleman.weights import PERTURBATION_TERMS, ConjugatedOperator, ConvexifiedWeight, conjugate_apply
from core.errors import ParameterError
from geometry.calculus import differential
from geometry.fields import OneForm, ScalarField
from utils.presets import electric, potential


def test_weight_limits():
    with pytest.raises(ParameterError):
        ConvexifiedWeight(sign=1, h=0.05, eps=0.1, max_h_over_eps=0.25)
    with pytest.raises(ParameterError):
        ConvexifiedWeight(sign=1, h=0.01, eps=0.5)
    with pytest.raises(ParameterError):
        ConvexifiedWeight(sign=0, h=0.01)
    plain = ConvexifiedWeight.plain(-1, 0.3)
    assert plain.is_plain and plain.convexity == 0.0


def test_weight_differential_is_exact(chart):
    weight = ConvexifiedWeight(sign=-1, h=0.02, eps=0.1)
    numeric = differential(chart, weight.values(chart))
    assert_allclose(numeric.component_x1, weight.differential(chart).component_x1, atol=1e-10)
    assert not np.any(weight.differential(chart).component_r)


def test_sparse_rows_agree_with_apply(flat_chart, cache):
    A = potential(flat_chart, 'smooth')
    q = electric(flat_chart, 'smooth-bump')
    operator = ConjugatedOperator.for_weight(flat_chart, A, q, ConvexifiedWeight(1, 0.02, eps=0.1), cache)
    rng = np.random.default_rng(3)
    w = ScalarField(flat_chart, rng.normal(size=flat_chart.shape) + 1j * rng.normal(size=flat_chart.shape))
    from_rows = operator.rows @ w.values.ravel()
    from_apply = operator.apply(w).values[flat_chart.interior_mask]
    assert_allclose(from_rows, from_apply, rtol=1e-10, atol=1e-10 * np.max(np.abs(from_apply)))


def test_solve_meets_dirichlet_problem(flat_chart, cache):
    A = potential(flat_chart, 'smooth')
    q = electric(flat_chart, 'smooth-bump')
    operator = ConjugatedOperator.for_weight(flat_chart, A, q, ConvexifiedWeight.plain(1, 0.2), cache)
    v = ScalarField.constant(flat_chart, 1.0)
    w = operator.solve(v)
    assert not np.any(w.values[flat_chart.boundary_mask])
    assert_allclose(operator.apply(w).values[flat_chart.interior_mask], 1.0, atol=1e-9)


def test_conjugate_apply_checks_h(flat_chart):
    zero = OneForm.zeros(flat_chart)
    u = ScalarField.zeros(flat_chart)
    with pytest.raises(ParameterError):
        conjugate_apply(flat_chart, zero, ScalarField.zeros(flat_chart), ConvexifiedWeight.plain(1, 0.1), 0.2, u)


def test_samples_are_admissible_and_seeded(chart):
    first = boundary_samples(chart, 4, seed=7)
    again = boundary_samples(chart, 4, seed=7)
    other = boundary_samples(chart, 4, seed=8)
    for u, v in zip(first, again):
        assert np.array_equal(u.values, v.values)
    assert not np.array_equal(first[0].values, other[0].values)
    assert all(not np.any(u.values[chart.boundary_mask]) for u in first)
    inner = interior_samples(chart, 3, seed=1)
    assert all(not np.any(u.values[chart.boundary_mask]) for u in inner)


def test_perturbation_terms(flat_chart):
    u = boundary_samples(flat_chart, 1)[0]
    weight = ConvexifiedWeight(1, 0.02, eps=0.1)
    zero = ConjugatedOperator.for_weight(flat_chart, OneForm.zeros(flat_chart), ScalarField.zeros(flat_chart), weight)
    terms = perturbation_terms(zero, u)
    assert set(terms) == set(PERTURBATION_TERMS)
    assert all(value == 0.0 for value in terms.values())
    rough = ConjugatedOperator.for_weight(flat_chart, potential(flat_chart, 'rough-kink'),
                                          electric(flat_chart, 'smooth-bump'), weight)
    assert all(value > 0.0 for value in perturbation_terms(rough, u).values())


def test_boundary_estimate_without_potentials(chart, cache):
    zero = OneForm.zeros(chart)
    report = carleman_check_boundary(chart, zero, ScalarField.zeros(chart), (0.05, 0.025), eps=0.1, samples=8,
                                     max_h_over_eps=0.5, threshold=0.01, cache=cache)
    assert report.passed
    assert report.parameters == (0.05, 0.025)


def test_rejects_samples_that_touch_the_boundary(chart):
    zero = OneForm.zeros(chart)
    with pytest.raises(ParameterError):
        carleman_check_boundary(chart, zero, ScalarField.zeros(chart), (0.05, 0.025), eps=0.1,
                                samples=[ScalarField.constant(chart, 1.0)], max_h_over_eps=0.5)


def test_interior_estimate_is_bounded(chart, cache):
    A = potential(chart, 'rough-kink')
    q = electric(chart, 'smooth-bump')
    report = carleman_check_interior(chart, A, q, (0.2, 0.1, 0.05), samples=5, cache=cache)
    assert report.passed
