"""
dbar/cauchy.py - Direct Cauchy-kernel summation for the d-bar equation on (x1, r) planes

The kernel 1/(pi z) is sampled at node offsets; the self term (the singular
cell) is set to zero, which is the exact cell average of the odd integrand.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import signal

from core.cache import OperatorCache, default_cache
from core.errors import WindowError
from core.report import ConvergenceReport, ladder

log = logging.getLogger(__name__)

Shape2 = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class CauchyKernelGrid:
    """
    Kernel samples K[t] = 1/(pi z_t) for every source-to-output offset.

    Output node i sits at source index i + offset, so
    phi[i] = sum_j K(((i + offset) - j) d) rhs[j] d1 dr.
    """
    source_shape: Shape2
    output_shape: Shape2
    offset: Shape2
    spacings: Tuple[float, float]
    values: np.ndarray

    @classmethod
    def build(cls, source_shape: Shape2, output_shape: Shape2, offset: Shape2, spacings: Sequence[float],
              cache: Optional[OperatorCache] = None) -> 'CauchyKernelGrid':
        cache = default_cache if cache is None else cache
        source_shape = tuple(int(n) for n in source_shape)
        output_shape = tuple(int(n) for n in output_shape)
        offset = tuple(int(p) for p in offset)
        spacings = tuple(float(d) for d in spacings)
        key = (source_shape, output_shape, offset, spacings)
        values = cache.get_cauchy_kernel(key)
        if values is None:
            axes = [(np.arange(s + n - 1) - (s - 1) + p) * d
                    for s, n, p, d in zip(source_shape, output_shape, offset, spacings)]
            X, Y = np.meshgrid(*axes, indexing='ij')
            z = X + 1j * Y
            values = np.zeros(z.shape, dtype=complex)
            nonzero = z != 0
            values[nonzero] = 1.0 / (np.pi * z[nonzero])
            cache.set_cauchy_kernel(key, values)
            log.debug("Cauchy kernel %s -> %s offset %s", source_shape, output_shape, offset)
        return cls(source_shape=source_shape, output_shape=output_shape, offset=offset,
                   spacings=spacings, values=values)

    @classmethod
    def same_grid(cls, shape: Shape2, spacings: Sequence[float],
                  cache: Optional[OperatorCache] = None) -> 'CauchyKernelGrid':
        """Source and output on one grid"""
        return cls.build(shape, shape, (0, 0), spacings, cache)

    @property
    def cell_area(self) -> float:
        return self.spacings[0] * self.spacings[1]


def cauchy_transform(rhs: np.ndarray, kernel: CauchyKernelGrid) -> np.ndarray:
    """Discrete (1/(pi z)) * rhs; rhs must vanish on the outer ring of its window"""
    rhs = np.asarray(rhs)
    if rhs.shape != kernel.source_shape:
        raise WindowError(f"right-hand side shape {rhs.shape} does not match kernel window {kernel.source_shape}")
    ring = np.concatenate([rhs[0], rhs[-1], rhs[:, 0], rhs[:, -1]])
    if np.any(ring != 0):
        raise WindowError(f"right-hand side touches the window edge (max {np.max(np.abs(ring)):.3g})")
    if not np.any(rhs):
        return np.zeros(kernel.output_shape, dtype=complex)
    return signal.convolve2d(rhs.astype(complex), kernel.values, mode='valid') * kernel.cell_area


def dbar(values: np.ndarray, spacings: Sequence[float]) -> np.ndarray:
    """1/2 (d/dx1 + i d/dr) over the first two axes"""
    d1, dr = spacings[0], spacings[1]
    return 0.5 * (np.gradient(values, d1, axis=0, edge_order=2) + 1j * np.gradient(values, dr, axis=1, edge_order=2))


# --- manufactured oracle ---

def bump_oracle(x: np.ndarray, y: np.ndarray, center: complex = 0j, radius: float = 0.9) -> Tuple[np.ndarray, np.ndarray]:
    """
    F(s) = exp(-1/(1 - s/R^2)) with s = |z - z0|^2, and its exact d-bar F'(s)(z - z0).
    """
    z = x + 1j * y - center
    s = np.abs(z) ** 2
    inside = s < radius ** 2
    F = np.zeros(z.shape)
    dF = np.zeros(z.shape)
    t = 1.0 - s[inside] / radius ** 2
    F[inside] = np.exp(-1.0 / t)
    dF[inside] = -F[inside] / (radius ** 2 * t ** 2)
    return F.astype(complex), dF * z


@dataclass(frozen=True)
class RefinementStudy:
    spacings: Tuple[float, ...]
    sup_errors: Tuple[float, ...]
    residuals: Tuple[float, ...]

    @staticmethod
    def _ratios(values) -> Tuple[float, ...]:
        values = np.asarray(values)
        return tuple(float(a / b) if b > 0 else float('inf') for a, b in zip(values[:-1], values[1:]))

    @property
    def error_ratios(self) -> Tuple[float, ...]:
        return self._ratios(self.sup_errors)

    @property
    def residual_ratios(self) -> Tuple[float, ...]:
        return self._ratios(self.residuals)

    def passed(self, min_ratio: float = 1.7) -> bool:
        return all(r >= min_ratio for r in self.error_ratios + self.residual_ratios)

    def report(self) -> ConvergenceReport:
        return ladder('dbar_sup_error', 'Cauchy transform first-order convergence', self.spacings,
                      self.sup_errors, target_exponent=1.0, trend='bounded', parameter_name='grid')


def refinement_study(sizes: Sequence[int] = (33, 65, 129), half_width: float = 1.2, radius: float = 0.9,
                     center: complex = 0j, cache: Optional[OperatorCache] = None) -> RefinementStudy:
    """Sup error against the bump oracle and L2 d-bar residual on a square window, per grid"""
    spacings, errors, residuals = [], [], []
    for n in sizes:
        axis = np.linspace(-half_width, half_width, int(n))
        d = float(axis[1] - axis[0])
        X, Y = np.meshgrid(axis, axis, indexing='ij')
        exact, rhs = bump_oracle(X, Y, center, radius)
        kernel = CauchyKernelGrid.same_grid(X.shape, (d, d), cache)
        phi = cauchy_transform(rhs, kernel)
        residual = dbar(phi, (d, d)) - rhs
        spacings.append(d)
        errors.append(float(np.max(np.abs(phi - exact))))
        residuals.append(float(np.sqrt(np.sum(np.abs(residual[1:-1, 1:-1]) ** 2) * d * d)))
        log.info("d-bar grid %d: sup error %.3e, residual %.3e", n, errors[-1], residuals[-1])
    return RefinementStudy(spacings=tuple(spacings), sup_errors=tuple(errors), residuals=tuple(residuals))
