"""
dbar/phase.py - Phase corrections solving d-bar Phi = -(sign/2)(A_1 + i A_r) slice by slice in theta
"""

import logging
from typing import Optional, Sequence

import numpy as np

from core.cache import OperatorCache
from core.errors import ParameterError
from core.report import ReportBundle, ladder
from dbar.cauchy import CauchyKernelGrid, cauchy_transform
from geometry.calculus import differential, laplace_beltrami
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from geometry.quadrature import lp_norm
from mollify.kernel import DEFAULT_KERNEL, MollifierKernel, extend, regularize_one_form

log = logging.getLogger(__name__)

DEFAULT_WIDTH = 0.5
EXTENSIONS = ('reflect', 'zero')


def window_pad(chart: CylinderChart, width: float):
    """Nodes added on each side in x1 and r: the extension width plus one node"""
    return tuple(int(np.ceil(width / d - 1e-9)) + 1 for d in chart.spacings[:2])


def phase_correction(A_tau: OneForm, sign: int, width: float = DEFAULT_WIDTH, extension: str = 'reflect',
                     cache: Optional[OperatorCache] = None) -> ScalarField:
    """
    Phi with d-bar Phi = -(sign/2)((A_tau)_1 + i (A_tau)_r) in (x1, r), theta a parameter.

    The source is extended past the chart by ``extension`` over ``width`` in
    x1 and r; the convolution window adds one node beyond that.
    """
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign}")
    if extension not in EXTENSIONS:
        raise ParameterError(f"unknown extension {extension!r}; expected one of {EXTENSIONS}")
    if width <= 0:
        raise ParameterError(f"extension width must be positive, got {width}")
    chart = A_tau.chart
    source = A_tau.component_x1 + 1j * A_tau.component_r
    if not np.any(source):
        return ScalarField.zeros(chart)

    pad = window_pad(chart, width)
    extended = extend(source, pad, chart.spacings[:2], width, axes=(0, 1), mode=extension)
    kernel = CauchyKernelGrid.build(extended.shape[:2], chart.shape[:2], pad, chart.spacings[:2], cache)
    phi = np.empty(chart.shape, dtype=complex)
    for k in range(chart.shape[2]):
        phi[:, :, k] = cauchy_transform(extended[:, :, k], kernel)
    return ScalarField(chart, -0.5 * sign * phi)


def pair_phase(A1: OneForm, A2: OneForm, width: float = DEFAULT_WIDTH,
               cache: Optional[OperatorCache] = None) -> ScalarField:
    """Phi^(1) + Phi^(2) = -1/2 C*(Z(delta_1 + i delta_r)) with delta = A1 - A2 zero-extended"""
    require_same_chart(A1, A2)
    return phase_correction(A1 - A2, 1, width=width, extension='zero', cache=cache)


def phase_estimates(Phi_taus: Sequence[ScalarField], Phi: ScalarField, tau_list: Sequence[float]) -> ReportBundle:
    """
    The five phase quantities across the tau ladder:
    ||Phi_tau||_inf, tau ||grad Phi_tau||_inf and tau^2 ||Lap Phi_tau||_inf bounded;
    tau ||Lap Phi_tau||_{L^n} and ||Phi_tau - Phi||_{L^n} / tau decreasing.
    """
    taus = np.asarray(tau_list, dtype=float)
    if len(Phi_taus) != len(taus):
        raise ParameterError(f"{len(Phi_taus)} phases for {len(taus)} tau values")
    chart = Phi.chart
    n = chart.dimension
    sup, gradient, lap_sup, lap_ln, approximation = [], [], [], [], []
    for phi_tau in Phi_taus:
        require_same_chart(Phi, phi_tau)
        lap = laplace_beltrami(chart, phi_tau)
        sup.append(lp_norm(chart, phi_tau, np.inf))
        gradient.append(lp_norm(chart, differential(chart, phi_tau), np.inf))
        lap_sup.append(lp_norm(chart, lap, np.inf))
        lap_ln.append(lp_norm(chart, lap, n))
        approximation.append(lp_norm(chart, phi_tau - Phi, n))

    reports = {
        'sup': ladder('sup', 'phase bounded in L^inf', taus, sup, 0.0, 'bounded'),
        'gradient_sup': ladder('gradient_sup', 'phase gradient O(1/tau) in L^inf', taus, gradient, -1.0, 'bounded'),
        'laplacian_sup': ladder('laplacian_sup', 'phase Laplacian O(1/tau^2) in L^inf', taus, lap_sup, -2.0, 'bounded'),
        'laplacian_ln': ladder('laplacian_ln', 'phase Laplacian o(1/tau) in L^n', taus, lap_ln, -1.0),
        'approximation': ladder('approximation', 'regularized phase o(tau) in L^n', taus, approximation, 1.0),
    }
    return ReportBundle(name='phase_estimates', reports=reports)


def phase_ladder(A: OneForm, tau_list: Sequence[float], sign: int = 1, kernel: MollifierKernel = DEFAULT_KERNEL,
                 width: float = DEFAULT_WIDTH, cache: Optional[OperatorCache] = None) -> ReportBundle:
    """Phi from the unmollified A against Phi_tau from A_tau for every rung"""
    taus = [float(t) for t in tau_list]
    tau_max = taus[0]
    Phi = phase_correction(A, sign, width, cache=cache)
    Phi_taus = [phase_correction(regularize_one_form(A, tau, kernel, tau_max=tau_max, cache=cache), sign, width,
                                 cache=cache)
                for tau in taus]
    log.debug("phase ladder over %d rungs, sign %+d", len(taus), sign)
    return phase_estimates(Phi_taus, Phi, taus)
