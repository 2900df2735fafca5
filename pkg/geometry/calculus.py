"""
geometry/calculus.py - Discrete differential calculus on the warped cylinder

Derivatives are second-order centered differences (numpy.gradient, one-sided
second-order stencils on the boundary). The Laplace-Beltrami operator uses a
compact divergence-form stencil at interior nodes so that the sparse Dirichlet
matrices assembled here reproduce it exactly.
"""

import logging
from typing import Iterable, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from core.cache import OperatorCache, default_cache
from core.errors import DomainError
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, VectorField, require_same_chart

log = logging.getLogger(__name__)

MAGNETIC_TERMS = ('laplacian', 'codifferential', 'cross', 'potential')

_INTERIOR = (slice(1, -1),) * 3


def _gradient(values: np.ndarray, spacing: float, axis: int) -> np.ndarray:
    return np.gradient(values, spacing, axis=axis, edge_order=2)


def _shift(axis: int, offset: int) -> Tuple[slice, slice, slice]:
    index = list(_INTERIOR)
    index[axis] = slice(1 + offset, -1 + offset if offset < 1 else None)
    return tuple(index)


def differential(chart: CylinderChart, u: ScalarField) -> OneForm:
    require_same_chart(chart, u)
    return OneForm(chart, *(_gradient(u.values, d, k) for k, d in enumerate(chart.spacings)))


def codifferential(chart: CylinderChart, alpha: OneForm) -> ScalarField:
    """d*a = -|g|^(-1/2) d_j(|g|^(1/2) g^jk a_k)"""
    require_same_chart(chart, alpha)
    s = chart.sqrt_det
    total = sum(_gradient(s * ginv * a, d, k)
                for k, (ginv, a, d) in enumerate(zip(chart.inverse_metric_diagonal, alpha, chart.spacings)))
    return ScalarField(chart, -total / s)


def laplace_beltrami(chart: CylinderChart, u: ScalarField) -> ScalarField:
    require_same_chart(chart, u)
    values = -codifferential(chart, differential(chart, u)).values
    values = np.array(values)
    values[_INTERIOR] = _compact_laplacian(chart, u.values)
    return ScalarField(chart, values)


def _compact_laplacian(chart: CylinderChart, values: np.ndarray) -> np.ndarray:
    s = chart.sqrt_det
    centre = values[_INTERIOR]
    total = np.zeros(centre.shape, dtype=complex)
    for k, (ginv, d) in enumerate(zip(chart.inverse_metric_diagonal, chart.spacings)):
        K = s * ginv
        k_plus = 0.5 * (K[_INTERIOR] + K[_shift(k, 1)])
        k_minus = 0.5 * (K[_INTERIOR] + K[_shift(k, -1)])
        total += (k_plus * (values[_shift(k, 1)] - centre) - k_minus * (centre - values[_shift(k, -1)])) / d ** 2
    return total / s[_INTERIOR]


def inner(chart: CylinderChart, alpha: OneForm, beta: OneForm) -> ScalarField:
    """<a, b>_g = g^jk a_j b_k, bilinear (no conjugation)"""
    require_same_chart(chart, alpha, beta)
    return ScalarField(chart, sum(ginv * a * b for ginv, a, b in zip(chart.inverse_metric_diagonal, alpha, beta)))


def norm_squared(chart: CylinderChart, alpha: OneForm) -> np.ndarray:
    """Pointwise Hermitian |a|_g^2"""
    require_same_chart(chart, alpha)
    return sum(ginv * np.abs(a) ** 2 for ginv, a in zip(chart.inverse_metric_diagonal, alpha))


def sharp(chart: CylinderChart, alpha: OneForm) -> VectorField:
    require_same_chart(chart, alpha)
    return VectorField(chart, *(ginv * a for ginv, a in zip(chart.inverse_metric_diagonal, alpha)))


def flat(chart: CylinderChart, X: VectorField) -> OneForm:
    require_same_chart(chart, X)
    return OneForm(chart, *(g * x for g, x in zip(chart.metric_diagonal, X)))


def magnetic_apply(chart: CylinderChart, A: OneForm, q: ScalarField, u: ScalarField,
                   terms: Iterable[str] = MAGNETIC_TERMS) -> ScalarField:
    """L_{A,q} u = -Lap u + i(d*A)u - 2i<A, du> + (<A, A> + q)u"""
    require_same_chart(chart, A, q, u)
    terms = set(terms)
    result = np.zeros(chart.shape, dtype=complex)
    if 'laplacian' in terms:
        result -= laplace_beltrami(chart, u).values
    if 'codifferential' in terms:
        result += 1j * codifferential(chart, A).values * u.values
    if 'cross' in terms:
        result -= 2j * inner(chart, A, differential(chart, u)).values
    if 'potential' in terms:
        result += (inner(chart, A, A).values + q.values) * u.values
    return ScalarField(chart, result)


def exterior_derivative(chart: CylinderChart, alpha: OneForm) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Components (da)_{1r}, (da)_{1theta}, (da)_{r theta}"""
    require_same_chart(chart, alpha)
    d1, dr, dt = chart.spacings
    a1, ar, at = alpha
    return (_gradient(ar, d1, 0) - _gradient(a1, dr, 1),
            _gradient(at, d1, 0) - _gradient(a1, dt, 2),
            _gradient(at, dr, 1) - _gradient(ar, dt, 2))


def divergence(chart: CylinderChart, X: VectorField) -> ScalarField:
    """div_g X = -d*(X flat)"""
    return -codifferential(chart, flat(chart, X))


# --- covariant derivatives of vector fields ---

def christoffel(chart: CylinderChart) -> np.ndarray:
    """Gamma^i_jk of the diagonal metric, shape (3, 3, 3) + grid"""
    G = chart.metric_diagonal
    ginv = chart.inverse_metric_diagonal
    dG = [[_gradient(G[a], chart.spacings[c], c) for c in range(3)] for a in range(3)]
    gamma = np.zeros((3, 3, 3) + chart.shape)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                value = np.zeros(chart.shape)
                if i == k:
                    value = value + dG[i][j]
                if i == j:
                    value = value + dG[i][k]
                if j == k:
                    value = value - dG[j][i]
                gamma[i, j, k] = 0.5 * ginv[i] * value
    return gamma


def covariant_derivative(chart: CylinderChart, X: VectorField, gamma: Optional[np.ndarray] = None) -> np.ndarray:
    """(nabla X)^i_j = d_j X^i + Gamma^i_jk X^k"""
    gamma = christoffel(chart) if gamma is None else gamma
    comps = X.stack()
    partial = np.stack([np.stack([_gradient(comps[i], chart.spacings[j], j) for j in range(3)]) for i in range(3)])
    return partial + np.einsum('ijk...,k...->ij...', gamma, comps)


def second_covariant_derivative(chart: CylinderChart, X: VectorField, gamma: Optional[np.ndarray] = None) -> np.ndarray:
    """(nabla^2 X)^i_jl for the (1,1)-tensor nabla X"""
    gamma = christoffel(chart) if gamma is None else gamma
    T = covariant_derivative(chart, X, gamma)
    partial = np.stack([np.stack([np.stack([_gradient(T[i, j], chart.spacings[l], l) for l in range(3)])
                                  for j in range(3)]) for i in range(3)])
    return (partial
            + np.einsum('ilm...,mj...->ijl...', gamma, T)
            - np.einsum('mlj...,im...->ijl...', gamma, T))


def tensor_norm(chart: CylinderChart, tensor: np.ndarray) -> np.ndarray:
    """Pointwise metric norm of a tensor with one upper and one or two lower indices"""
    G = np.stack(chart.metric_diagonal)
    ginv = np.stack(chart.inverse_metric_diagonal)
    if tensor.ndim == 5:
        weight = G[:, None] * ginv[None, :]
    elif tensor.ndim == 6:
        weight = G[:, None, None] * ginv[None, :, None] * ginv[None, None, :]
    else:
        raise DomainError(f"unsupported tensor rank {tensor.ndim - 3}")
    squared = weight * np.abs(tensor) ** 2
    return np.sqrt(squared.reshape((-1,) + chart.shape).sum(axis=0))


# --- sparse interior operators (Dirichlet rows) ---

def interior_index(chart: CylinderChart) -> np.ndarray:
    """Flat indices of the interior nodes in C order"""
    return np.flatnonzero(chart.interior_mask.ravel())


def boundary_index(chart: CylinderChart) -> np.ndarray:
    return np.flatnonzero(chart.boundary_mask.ravel())


def _interior_multi_index(chart: CylinderChart):
    return [idx[_INTERIOR].ravel() for idx in np.indices(chart.shape)]


def laplace_rows(chart: CylinderChart, cache: Optional[OperatorCache] = None) -> sp.csr_matrix:
    """Rows of the compact Laplace-Beltrami stencil at interior nodes, columns over all nodes"""
    cache = default_cache if cache is None else cache
    key = ('laplace_rows', chart.key)
    rows = cache.get_rows(key)
    if rows is not None:
        return rows

    n_interior = int(np.prod([n - 2 for n in chart.shape]))
    row_ids = np.arange(n_interior)
    centre = _interior_multi_index(chart)
    centre_flat = np.ravel_multi_index(centre, chart.shape)
    s = chart.sqrt_det
    s_centre = s[_INTERIOR].ravel()

    data, rows_i, cols = [], [], []
    diagonal = np.zeros(n_interior)
    for k, (ginv, d) in enumerate(zip(chart.inverse_metric_diagonal, chart.spacings)):
        K = s * ginv
        for offset in (1, -1):
            half = 0.5 * (K[_INTERIOR] + K[_shift(k, offset)]).ravel() / (d ** 2 * s_centre)
            neighbour = list(centre)
            neighbour[k] = centre[k] + offset
            data.append(half)
            rows_i.append(row_ids)
            cols.append(np.ravel_multi_index(neighbour, chart.shape))
            diagonal -= half
    data.append(diagonal)
    rows_i.append(row_ids)
    cols.append(centre_flat)

    total = int(np.prod(chart.shape))
    rows = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows_i), np.concatenate(cols))),
                         shape=(n_interior, total)).tocsr()
    cache.set_rows(key, rows)
    log.debug("assembled Laplace rows for %s: %s nnz=%d", chart.name, rows.shape, rows.nnz)
    return rows


def gradient_rows(chart: CylinderChart, axis: int, cache: Optional[OperatorCache] = None) -> sp.csr_matrix:
    """Centered first-derivative rows at interior nodes along one axis"""
    cache = default_cache if cache is None else cache
    key = ('gradient_rows', axis, chart.key)
    rows = cache.get_rows(key)
    if rows is not None:
        return rows

    n_interior = int(np.prod([n - 2 for n in chart.shape]))
    row_ids = np.arange(n_interior)
    centre = _interior_multi_index(chart)
    d = chart.spacings[axis]
    data, rows_i, cols = [], [], []
    for offset in (1, -1):
        neighbour = list(centre)
        neighbour[axis] = centre[axis] + offset
        data.append(np.full(n_interior, offset / (2.0 * d)))
        rows_i.append(row_ids)
        cols.append(np.ravel_multi_index(neighbour, chart.shape))

    total = int(np.prod(chart.shape))
    rows = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows_i), np.concatenate(cols))),
                         shape=(n_interior, total)).tocsr()
    cache.set_rows(key, rows)
    return rows
