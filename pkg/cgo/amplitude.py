"""
cgo/amplitude.py - Complex phase, theta profiles and the regularized CGO amplitude

    a = |g|^{-1/4} c^{1/2} e^{i Phi_tau} e^{i lambda (x1 + i r)} b(theta)

with d-bar Phi_tau = -(sign/2)((A_tau)_1 + i (A_tau)_r) solves the transport
equation 2<drho, da> + (Lap rho) a + 2i sign <A_tau, drho> a = 0.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.cache import OperatorCache
from core.errors import ParameterError, SupportError
from dbar.phase import DEFAULT_WIDTH, phase_correction
from geometry.calculus import differential, inner, laplace_beltrami
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from mollify.kernel import DEFAULT_KERNEL, MollifierKernel, regularize_one_form

log = logging.getLogger(__name__)

DEFAULT_KAPPA = 0.25
MAX_H = 0.5
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class ThetaProfile:
    """
    Smooth theta profile b vanishing at the ends of the arc.

    ``kind='bump'``: exp(1 - 1/(1 - t^2)) with t = (theta - center)/half_width.
    ``kind='trig'``: sin(mode * pi * s) with s the relative position in the arc.
    ``kind='constant'``: b = 1 (no support requirement; electric probes only).
    """
    kind: str = 'bump'
    center: float = 0.0
    half_width: float = 0.4
    mode: int = 1
    arc: Tuple[float, float] = (-np.pi / 6, np.pi / 6)

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.kind == 'bump':
            t = (theta - self.center) / self.half_width
            out = np.zeros(theta.shape)
            inside = np.abs(t) < 1
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
            return out
        if self.kind == 'trig':
            lo, hi = self.arc
            return np.sin(self.mode * np.pi * (theta - lo) / (hi - lo))
        if self.kind == 'constant':
            return np.ones(theta.shape)
        raise ParameterError(f"unknown theta profile kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == 'bump':
            return f"bump({self.center:.4g},{self.half_width:.4g})"
        if self.kind == 'trig':
            return f"trig({self.mode})"
        return self.kind


def check_support(chart: CylinderChart, b: ThetaProfile) -> np.ndarray:
    """b on the theta nodes; SupportError unless it vanishes at both ends of the arc"""
    values = b(chart.axes[2])
    scale = max(float(np.max(np.abs(values))), 1.0)
    ends = max(abs(values[0]), abs(values[-1]))
    if ends > SUPPORT_TOL * scale:
        raise SupportError(f"theta profile {b.label()} does not vanish at the arc ends (|b| = {ends:.3g})")
    return values


def regularization_scale(h: float, kappa: float = DEFAULT_KAPPA) -> float:
    """tau = kappa sqrt(h)"""
    if not 0 < h <= MAX_H:
        raise ParameterError(f"h must lie in (0, {MAX_H}], got {h}")
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    return float(kappa * np.sqrt(h))


# --- the complex phase rho = x1 + i r ---

def complex_phase(chart: CylinderChart) -> ScalarField:
    X1, R, _ = chart.mesh
    return ScalarField(chart, X1 + 1j * R)


def phase_differential(chart: CylinderChart) -> OneForm:
    """d rho = dx1 + i dr, exact"""
    ones = np.ones(chart.shape)
    return OneForm(chart, ones, 1j * ones, np.zeros(chart.shape))


def eikonal_residual(chart: CylinderChart) -> float:
    """max |<d rho, d rho>_g| over the nodes"""
    drho = phase_differential(chart)
    return float(np.max(np.abs(inner(chart, drho, drho).values)))


def holomorphic_factor(chart: CylinderChart, lam: float) -> ScalarField:
    X1, R, _ = chart.mesh
    return ScalarField(chart, np.exp(1j * lam * (X1 + 1j * R)))


def holomorphic_residual(chart: CylinderChart, lam: float) -> float:
    """max |4 dbar a0| with the exact partials d1 a0 = i lam a0, dr a0 = -lam a0"""
    a0 = holomorphic_factor(chart, lam).values
    dbar = 0.5 * (1j * lam * a0 + 1j * (-lam * a0))
    return float(np.max(np.abs(4.0 * dbar)))


def transport_residual(chart: CylinderChart, a: ScalarField, A_tau: OneForm, sign: int) -> ScalarField:
    """T(a) = 2<drho, da> + (Lap rho) a + 2i sign <A_tau, drho> a"""
    require_same_chart(chart, a, A_tau)
    drho = phase_differential(chart)
    lap_rho = laplace_beltrami(chart, complex_phase(chart)).values
    values = (2.0 * inner(chart, drho, differential(chart, a)).values
              + lap_rho * a.values
              + 2j * sign * inner(chart, A_tau, drho).values * a.values)
    return ScalarField(chart, values)


@dataclass(frozen=True, eq=False)
class AmplitudeParts:
    amplitude: ScalarField
    phase_correction: ScalarField
    A_tau: OneForm
    tau: float
    lam: float
    b: ThetaProfile


def amplitude_parts(chart: CylinderChart, A: OneForm, h: float, sign: int, lam: float, b: ThetaProfile,
                    kappa: float = DEFAULT_KAPPA, kernel: MollifierKernel = DEFAULT_KERNEL,
                    width: float = DEFAULT_WIDTH, cache: Optional[OperatorCache] = None) -> AmplitudeParts:
    require_same_chart(chart, A)
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign}")
    tau = regularization_scale(h, kappa)
    b_values = check_support(chart, b)

    A_tau = regularize_one_form(A, tau, kernel, cache=cache)
    phi_tau = phase_correction(A_tau, sign, width, cache=cache)
    envelope = chart.metric_determinant ** -0.25 * np.sqrt(chart.warp)
    a0 = holomorphic_factor(chart, lam).values
    values = envelope * np.exp(1j * phi_tau.values) * a0 * b_values[None, None, :]
    log.debug("amplitude h=%.4g tau=%.4g sign=%+d lambda=%.4g b=%s", h, tau, sign, lam, b.label())
    return AmplitudeParts(amplitude=ScalarField(chart, values), phase_correction=phi_tau, A_tau=A_tau,
                          tau=tau, lam=float(lam), b=b)


def build_amplitude(chart: CylinderChart, A: OneForm, h: float, sign: int, lam: float, b: ThetaProfile,
                    kappa: float = DEFAULT_KAPPA, kernel: MollifierKernel = DEFAULT_KERNEL,
                    width: float = DEFAULT_WIDTH, cache: Optional[OperatorCache] = None) -> Tuple[ScalarField, ScalarField]:
    """(a, Phi_tau) with tau = kappa sqrt(h)"""
    parts = amplitude_parts(chart, A, h, sign, lam, b, kappa, kernel, width, cache)
    return parts.amplitude, parts.phase_correction
