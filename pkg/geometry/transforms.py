"""
geometry/transforms.py - Log-polar coordinate change and the advection to magnetic reduction
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
import sympy

from core.errors import ConfigurationError, DomainError
from geometry.calculus import differential, divergence, flat, inner, laplace_beltrami
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, VectorField, require_same_chart

log = logging.getLogger(__name__)

AXIS_TOL = 1e-8


@dataclass(frozen=True)
class LogPolarSamples:
    """Cylinder coordinates (y1, vartheta, varphi) of Euclidean points and the warp c = exp(2 y1)"""
    y1: np.ndarray
    vartheta: np.ndarray
    varphi: np.ndarray
    warp: np.ndarray
    laplacian_error: float = float('nan')
    metric_error: float = float('nan')
    test_function: str = ''

    @property
    def coordinates(self) -> np.ndarray:
        return np.stack([self.y1, self.vartheta, self.varphi], axis=-1)


def log_polar_map(points, test_function: str = 'x3', verify: bool = True) -> LogPolarSamples:
    """
    Map points of the upper half space to (log|x|, polar angle, azimuth).

    With ``verify`` the pulled-back Euclidean metric is compared with
    exp(2 y1)(dy1^2 + g_S2) and the Euclidean Laplacian of ``test_function``
    with the Laplace-Beltrami operator of the warped metric, both at the
    sample points through sympy expressions.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != 3:
        raise DomainError(f"expected points in R^3, got trailing dimension {points.shape[-1]}")
    radius = np.linalg.norm(points, axis=-1)
    if np.any(radius == 0):
        raise DomainError("the origin has no log-polar image", 0.0)
    if np.any(points[:, 2] <= 0):
        raise DomainError("points must lie in the open upper half space x3 > 0", float(points[:, 2].min()))

    y1 = np.log(radius)
    vartheta = np.arccos(np.clip(points[:, 2] / radius, -1.0, 1.0))
    varphi = np.arctan2(points[:, 1], points[:, 0])
    samples = LogPolarSamples(y1=y1, vartheta=vartheta, varphi=varphi, warp=np.exp(2 * y1),
                              test_function=test_function)
    if not verify:
        return samples

    euclid, warped, metric_gap = _symbolic_checks(test_function)
    off_axis = np.sin(vartheta) > AXIS_TOL
    if not off_axis.all():
        log.debug("skipping %d sample(s) on the polar axis in the Laplacian comparison", int((~off_axis).sum()))
    lap_x = np.asarray(np.broadcast_to(euclid(*points.T), y1.shape), dtype=float)
    lap_y = np.asarray(np.broadcast_to(warped(y1, vartheta, varphi), y1.shape), dtype=float)
    laplacian_error = float(np.max(np.abs(lap_x - lap_y)[off_axis])) if off_axis.any() else 0.0
    metric_error = float(np.max(np.abs(np.broadcast_to(metric_gap(y1, vartheta, varphi), y1.shape))))
    log.debug("log-polar check on %s: laplacian error %.3g, metric error %.3g",
              test_function, laplacian_error, metric_error)
    return LogPolarSamples(y1=y1, vartheta=vartheta, varphi=varphi, warp=samples.warp,
                           laplacian_error=laplacian_error, metric_error=metric_error,
                           test_function=test_function)


@lru_cache(maxsize=16)
def _symbolic_checks(test_function: str) -> Tuple[Callable, Callable, Callable]:
    x = sympy.symbols('x1 x2 x3', real=True)
    y1, vt, vp = sympy.symbols('y1 vartheta varphi', real=True)
    try:
        u = sympy.sympify(test_function, locals=dict(zip(('x1', 'x2', 'x3'), x)))
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ConfigurationError(f"cannot parse test function {test_function!r}: {e}") from e
    unknown = u.free_symbols - set(x)
    if unknown:
        raise ConfigurationError(f"test function {test_function!r} uses symbols other than x1, x2, x3: "
                                 f"{sorted(map(str, unknown))}")

    euclid = sum(sympy.diff(u, xi, 2) for xi in x)

    embedding = (sympy.exp(y1) * sympy.sin(vt) * sympy.cos(vp),
                 sympy.exp(y1) * sympy.sin(vt) * sympy.sin(vp),
                 sympy.exp(y1) * sympy.cos(vt))
    pulled = u.subs(dict(zip(x, embedding)), simultaneous=True)
    coords = (y1, vt, vp)
    metric = (sympy.exp(2 * y1), sympy.exp(2 * y1), sympy.exp(2 * y1) * sympy.sin(vt) ** 2)
    sqrt_det = sympy.exp(3 * y1) * sympy.sin(vt)
    warped = sum(sympy.diff(sqrt_det / g * sympy.diff(pulled, q), q) for g, q in zip(metric, coords)) / sqrt_det

    jacobian = sympy.Matrix(embedding).jacobian(coords)
    gap = sympy.simplify(jacobian.T * jacobian - sympy.diag(*metric))
    gap_norm = sum(sympy.Abs(entry) for entry in gap)

    return (sympy.lambdify(x, euclid, 'numpy'),
            sympy.lambdify(coords, warped, 'numpy'),
            sympy.lambdify(coords, gap_norm, 'numpy'))


def advection_to_magnetic(chart: CylinderChart, X: VectorField) -> Tuple[OneForm, ScalarField]:
    """(A, q) = (i X^flat / 2, <X, X>_g / 4 - div_g X / 2), so that L_{A,q} = L_X"""
    require_same_chart(chart, X)
    if not X.is_real:
        imag = max(float(np.max(np.abs(c.imag))) for c in X)
        raise DomainError("advection field must be real-valued", imag)
    X_flat = flat(chart, X)
    A = X_flat * 0.5j
    q = 0.25 * inner(chart, X_flat, X_flat) - 0.5 * divergence(chart, X)
    return A, q


def advection_apply(chart: CylinderChart, X: VectorField, u: ScalarField) -> ScalarField:
    """L_X u = -Lap_g u + X(u)"""
    require_same_chart(chart, X, u)
    transport = sum(x * du for x, du in zip(X, differential(chart, u)))
    return ScalarField(chart, -laplace_beltrami(chart, u).values + transport)
