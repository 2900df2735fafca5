"""
geometry/quadrature.py - Trapezoid quadrature and discrete norms
"""

from functools import lru_cache
from typing import Optional, Union

import numpy as np

from geometry.calculus import differential
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart


def trapezoid_weights(n: int, spacing: float) -> np.ndarray:
    weights = np.full(n, spacing)
    weights[[0, -1]] = 0.5 * spacing
    return weights


def flat_weights(chart: CylinderChart) -> np.ndarray:
    """Tensor trapezoid weights for dx1 dr dtheta"""
    return _flat_weights(chart.grid_sizes, chart.spacings)


@lru_cache(maxsize=64)
def _flat_weights(sizes, spacings) -> np.ndarray:
    w = [trapezoid_weights(n, d) for n, d in zip(sizes, spacings)]
    weights = w[0][:, None, None] * w[1][None, :, None] * w[2][None, None, :]
    weights.setflags(write=False)
    return weights


def volume_weights(chart: CylinderChart) -> np.ndarray:
    """Weights for dV_g = |g|^(1/2) dx1 dr dtheta"""
    return flat_weights(chart) * chart.sqrt_det


def _values(f: Union[ScalarField, np.ndarray]) -> np.ndarray:
    return f.values if isinstance(f, ScalarField) else np.asarray(f)


def integrate_volume(chart: CylinderChart, f: Union[ScalarField, np.ndarray]) -> complex:
    if isinstance(f, ScalarField):
        require_same_chart(chart, f)
    return complex(np.sum(volume_weights(chart) * _values(f)))


def integrate_flat(chart: CylinderChart, f: Union[ScalarField, np.ndarray]) -> complex:
    """Quadrature of f dx1 dr dtheta (no metric density)"""
    if isinstance(f, ScalarField):
        require_same_chart(chart, f)
    return complex(np.sum(flat_weights(chart) * _values(f)))


def l2_inner(chart: CylinderChart, u: ScalarField, v: ScalarField) -> complex:
    """(u, v) = int u conj(v) dV_g"""
    return integrate_volume(chart, u.values * np.conj(v.values))


def lp_norm(chart: CylinderChart, f: Union[ScalarField, OneForm, np.ndarray], p: float = 2.0,
            mask: Optional[np.ndarray] = None) -> float:
    """Discrete L^p(M) norm; one-forms use the pointwise metric norm"""
    pointwise = pointwise_modulus(chart, f)
    weights = volume_weights(chart)
    if mask is not None:
        weights = weights * mask
    if np.isinf(p):
        return float(np.max(pointwise if mask is None else pointwise[mask]))
    return float(np.sum(weights * pointwise ** p) ** (1.0 / p))


def sup_norm(chart: CylinderChart, f, mask: Optional[np.ndarray] = None) -> float:
    return lp_norm(chart, f, np.inf, mask)


def pointwise_modulus(chart: CylinderChart, f) -> np.ndarray:
    if isinstance(f, OneForm):
        require_same_chart(chart, f)
        return np.sqrt(sum(ginv * np.abs(a) ** 2 for ginv, a in zip(chart.inverse_metric_diagonal, f)))
    return np.abs(_values(f))


def hscl_norm(chart: CylinderChart, u: ScalarField, h: float) -> float:
    """Semiclassical H^1 norm ||h grad u|| + ||u||"""
    return h * lp_norm(chart, differential(chart, u)) + lp_norm(chart, u)


def distance_to_faces(chart: CylinderChart) -> np.ndarray:
    """Coordinate distance from each node to the nearest chart face"""
    X1, R, TH = chart.mesh
    parts = [np.minimum(X - lo, hi - X)
             for X, (lo, hi) in zip((X1, R, TH), (chart.x1_range, chart.r_range, chart.theta_range))]
    return np.minimum(np.minimum(parts[0], parts[1]), parts[2])
