"""
mollify/kernel.py - Radial bump mollifier, the reflect-and-cutoff extension and discrete convolution

The chart is extended by even reflection across every face and multiplied by a
smooth cutoff that equals 1 within half the extension width and vanishes at
the full width. Convolution with the scaled kernel only reaches tau beyond a
face, so mollified values never see the cutoff as long as tau <= width / 2.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, ndimage
from scipy.special import gamma

from core.cache import OperatorCache, default_cache
from core.errors import ParameterError
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField

log = logging.getLogger(__name__)

Mollifiable = Union[ScalarField, OneForm]


def _bump(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    out = np.zeros(rho.shape)
    inside = rho < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - rho[inside] ** 2))
    return out


@dataclass(frozen=True)
class MollifierKernel:
    """Psi(x) = exp(-1/(1-|x|^2)) / N on the unit ball of R^n, radial by construction"""
    dimension: int = 3
    support_radius: float = 1.0
    samples: int = 65

    @cached_property
    def normalization(self) -> float:
        sphere = 2.0 * np.pi ** (self.dimension / 2) / _gamma_half(self.dimension)
        value, _ = integrate.quad(lambda t: t ** (self.dimension - 1) * float(_bump(t)), 0.0, 1.0,
                                  epsabs=1e-14, epsrel=1e-13, limit=200)
        return float(sphere * value * self.support_radius ** self.dimension)

    def profile(self, rho) -> np.ndarray:
        """Psi as a function of |x|"""
        return _bump(np.asarray(rho, dtype=float) / self.support_radius) / self.normalization

    @property
    def profile_samples(self) -> np.ndarray:
        return self.profile(np.linspace(0.0, self.support_radius, self.samples))

    def gradient_l1(self) -> float:
        """||grad Psi||_{L^1}, the constant in the Young bound tau ||grad f_tau||_inf <= ||f||_inf ||grad Psi||_1"""
        sphere = 2.0 * np.pi ** (self.dimension / 2) / _gamma_half(self.dimension)

        def integrand(t):
            if t >= 1.0:
                return 0.0
            return t ** (self.dimension - 1) * float(_bump(t)) * 2.0 * t / (1.0 - t * t) ** 2

        value, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
        return float(sphere * value * self.support_radius ** (self.dimension - 1) / self.normalization)

    def stencil(self, tau: float, spacings: Sequence[float], cache: Optional[OperatorCache] = None) -> np.ndarray:
        """Node weights of Psi_tau on the grid, summing to one"""
        cache = default_cache if cache is None else cache
        key = ('mollifier', self.dimension, self.support_radius, float(tau), tuple(float(d) for d in spacings))
        stencil = cache.get_stencil(key)
        if stencil is not None:
            return stencil
        reach = tau * self.support_radius
        half = [int(np.floor(reach / d + 1e-9)) for d in spacings]
        offsets = np.meshgrid(*[np.arange(-m, m + 1) * d for m, d in zip(half, spacings)], indexing='ij')
        rho = np.sqrt(sum(o ** 2 for o in offsets)) / tau
        weights = self.profile(rho)
        weights = weights / weights.sum()
        cache.set_stencil(key, weights)
        log.debug("mollifier stencil tau=%.4g half-widths=%s", tau, half)
        return weights


def _gamma_half(n: int) -> float:
    return float(gamma(n / 2))


DEFAULT_KERNEL = MollifierKernel()


def smooth_cutoff(distance: np.ndarray, width: float) -> np.ndarray:
    """1 for distance <= width/2, 0 for distance >= width, C-infinity in between"""
    distance = np.asarray(distance, dtype=float)
    if width <= 0:
        return (distance <= 0).astype(float)
    t = np.clip((distance - 0.5 * width) / (0.5 * width), 0.0, 1.0)
    return _bump_step(1.0 - t)


def _bump_step(t: np.ndarray) -> np.ndarray:
    """Smooth step: 0 at t <= 0, 1 at t >= 1"""
    def e(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out
    a, b = e(t), e(1.0 - t)
    return a / (a + b)


def extend(values: np.ndarray, pad: Sequence[int], spacings: Sequence[float], width: float,
           axes: Optional[Sequence[int]] = None, mode: str = 'reflect') -> np.ndarray:
    """
    Extend an array beyond its faces by ``pad`` nodes per axis.

    ``mode='reflect'`` reflects evenly across each face and applies the smooth
    cutoff of the given width; ``mode='zero'`` extends by zero and takes the
    face nodes at the mean of the one-sided values, half their own.
    """
    values = np.asarray(values)
    axes = tuple(range(values.ndim)) if axes is None else tuple(axes)
    pad_width = [(0, 0)] * values.ndim
    for axis, p in zip(axes, pad):
        pad_width[axis] = (int(p), int(p))
    if mode == 'zero':
        values = np.array(values, dtype=np.result_type(values, 0.5))
        for axis in axes:
            face = [slice(None)] * values.ndim
            for end in (0, -1):
                face[axis] = end
                values[tuple(face)] *= 0.5
        return np.pad(values, pad_width, mode='constant')
    if mode != 'reflect':
        raise ParameterError(f"unknown extension mode {mode!r}")
    extended = np.pad(values, pad_width, mode='reflect')
    for axis, p, d in zip(axes, pad, spacings):
        n = values.shape[axis]
        index = np.arange(-int(p), n + int(p))
        outside = np.maximum(np.maximum(-index, index - (n - 1)), 0) * d
        shape = [1] * values.ndim
        shape[axis] = -1
        extended = extended * smooth_cutoff(outside, width).reshape(shape)
    return extended


def _check_tau(chart: CylinderChart, tau: float, tau_max: float):
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    limit = 0.5 * min(chart.extents)
    if not tau < limit:
        raise ParameterError(f"tau = {tau} must be smaller than half the smallest chart extent ({limit:.4g})")
    if tau > tau_max + 1e-12:
        raise ParameterError(f"tau = {tau} exceeds the extension reach tau_max = {tau_max}")


def _convolve(values: np.ndarray, stencil: np.ndarray) -> np.ndarray:
    real = ndimage.convolve(values.real, stencil, mode='constant')
    if np.iscomplexobj(values) and np.any(values.imag):
        return real + 1j * ndimage.convolve(values.imag, stencil, mode='constant')
    return real.astype(complex)


def mollify_array(chart: CylinderChart, values: np.ndarray, tau: float,
                  kernel: MollifierKernel = DEFAULT_KERNEL, tau_max: Optional[float] = None,
                  cache: Optional[OperatorCache] = None) -> np.ndarray:
    tau_max = tau if tau_max is None else tau_max
    _check_tau(chart, tau, tau_max)
    stencil = kernel.stencil(tau, chart.spacings, cache)
    pad = [s // 2 for s in stencil.shape]
    extended = extend(values, pad, chart.spacings, width=2.0 * tau_max)
    result = _convolve(extended, stencil)
    crop = tuple(slice(p, p + n) for p, n in zip(pad, chart.shape))
    return result[crop]


def mollify(f: Mollifiable, tau: float, kernel: MollifierKernel = DEFAULT_KERNEL,
            tau_max: Optional[float] = None, cache: Optional[OperatorCache] = None) -> Mollifiable:
    """f * Psi_tau after the reflect-and-cutoff extension; one-forms are mollified componentwise"""
    if isinstance(f, OneForm):
        return OneForm(f.chart, *(mollify_array(f.chart, c, tau, kernel, tau_max, cache) for c in f))
    return ScalarField(f.chart, mollify_array(f.chart, f.values, tau, kernel, tau_max, cache))


def regularize_one_form(A: OneForm, tau: float, kernel: MollifierKernel = DEFAULT_KERNEL,
                        tau_max: Optional[float] = None, cache: Optional[OperatorCache] = None) -> OneForm:
    """A_tau, the componentwise mollification of the extended potential"""
    if not isinstance(A, OneForm):
        raise ParameterError(f"expected a OneForm, got {type(A).__name__}")
    return mollify(A, tau, kernel, tau_max, cache)


def stencil_half_widths(chart: CylinderChart, tau: float, kernel: MollifierKernel = DEFAULT_KERNEL) -> Tuple[int, ...]:
    return tuple(int(np.floor(tau * kernel.support_radius / d + 1e-9)) for d in chart.spacings)
