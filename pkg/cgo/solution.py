"""
cgo/solution.py - CGO solutions u = e^{sign rho/h}(a + r), their norm ledgers and h-ladders
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cgo.amplitude import (
    DEFAULT_KAPPA,
    ThetaProfile,
    amplitude_parts,
    complex_phase,
    eikonal_residual,
    transport_residual,
)
from cgo.remainder import cgo_operator, remainder_source, solve_remainder
from core.cache import OperatorCache
from core.errors import NumericError, ParameterError
from core.report import ReportBundle, ladder
from dbar.phase import DEFAULT_WIDTH, phase_correction
from geometry.calculus import differential, laplace_beltrami
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField
from geometry.quadrature import lp_norm
from mollify.kernel import DEFAULT_KERNEL, MollifierKernel

log = logging.getLogger(__name__)

EXP_LIMIT = 700.0

# ledger key -> (anchor, target exponent in h, trend)
LEDGER = {
    'a_sup': ('amplitude O(1) in L^inf', 0.0, 'bounded'),
    'grad_a_sup': ('amplitude gradient O(h^-1/2) in L^inf', -0.5, 'bounded'),
    'lap_a_sup': ('amplitude Laplacian O(h^-1) in L^inf', -1.0, 'bounded'),
    'a_l2': ('amplitude O(1) in L^2', 0.0, 'bounded'),
    'grad_a_l2': ('amplitude gradient O(1) in L^2', 0.0, 'bounded'),
    'lap_a_l2': ('amplitude Laplacian o(h^-1/2) in L^2', -0.5, 'decreasing'),
    'phase_error_l3': ('regularized phase o(h^1/2) in L^n', 0.5, 'decreasing'),
    'remainder_hscl': ('remainder o(h^1/2) in H^1_scl', 0.5, 'decreasing'),
}


@dataclass(frozen=True, eq=False)
class CGOSolution:
    chart: CylinderChart
    h: float
    tau: float
    sign: int
    lam: float
    b: ThetaProfile
    amplitude: ScalarField
    phase_correction: ScalarField
    remainder: ScalarField
    A_tau: OneForm
    norm_ledger: Dict[str, float] = field(default_factory=dict)
    source_norms: Dict[str, float] = field(default_factory=dict)

    @property
    def rho(self) -> ScalarField:
        return complex_phase(self.chart)

    @property
    def W(self) -> ScalarField:
        """a + r, the factor multiplying e^{sign rho/h}"""
        return self.amplitude + self.remainder

    def field(self) -> ScalarField:
        """u with the exponential formed explicitly; NumericError when it would overflow"""
        exponent = self.sign * self.rho.values / self.h
        if np.max(exponent.real) > EXP_LIMIT:
            raise NumericError(f"e^(sign rho/h) overflows at h = {self.h}")
        return ScalarField(self.chart, np.exp(exponent) * self.W.values)

    @property
    def eikonal_residual(self) -> float:
        return eikonal_residual(self.chart)


def amplitude_norms(chart: CylinderChart, a: ScalarField) -> Dict[str, float]:
    da = differential(chart, a)
    lap = laplace_beltrami(chart, a)
    return {
        'a_sup': lp_norm(chart, a, np.inf),
        'grad_a_sup': lp_norm(chart, da, np.inf),
        'lap_a_sup': lp_norm(chart, lap, np.inf),
        'a_l2': lp_norm(chart, a),
        'grad_a_l2': lp_norm(chart, da),
        'lap_a_l2': lp_norm(chart, lap),
    }


def build_cgo(chart: CylinderChart, A: OneForm, q: ScalarField, h: float, sign: int, lam: float, b: ThetaProfile,
              kappa: float = DEFAULT_KAPPA, kernel: MollifierKernel = DEFAULT_KERNEL, width: float = DEFAULT_WIDTH,
              cache: Optional[OperatorCache] = None) -> CGOSolution:
    """Amplitude, remainder source and remainder solve, with the full norm ledger"""
    parts = amplitude_parts(chart, A, h, sign, lam, b, kappa, kernel, width, cache)
    a = parts.amplitude
    v, source_norms = remainder_source(chart, A, parts.A_tau, q, a, h, sign=sign, tau=parts.tau, kappa=kappa,
                                       include_transport=True, cache=cache)
    r, remainder_norms = solve_remainder(chart, A, q, h, sign, v, cache=cache)

    phi = phase_correction(A, sign, width, cache=cache)
    ledger = amplitude_norms(chart, a)
    ledger['phase_error_l3'] = lp_norm(chart, parts.phase_correction - phi, chart.dimension)
    ledger['remainder_hscl'] = remainder_norms['remainder_hscl']
    ledger['source_l2'] = source_norms['total']
    ledger['relative_residual'] = remainder_norms['relative_residual']
    ledger['transport_l2'] = lp_norm(chart, transport_residual(chart, a, parts.A_tau, sign))
    log.info("CGO h=%.4g sign=%+d lambda=%.3g: ||r||_H1scl=%.3e ||v||=%.3e",
             h, sign, lam, ledger['remainder_hscl'], ledger['source_l2'])
    return CGOSolution(chart=chart, h=float(h), tau=parts.tau, sign=sign, lam=float(lam), b=b, amplitude=a,
                       phase_correction=parts.phase_correction, remainder=r, A_tau=parts.A_tau,
                       norm_ledger=ledger, source_norms=source_norms)


def cgo_ladder(solutions: Sequence[CGOSolution]) -> ReportBundle:
    """One report per ledger quantity across the h ladder, plus ||v||_2 / h^{3/2} decreasing"""
    hs = [s.h for s in solutions]
    reports = {}
    for key, (anchor, exponent, trend) in LEDGER.items():
        reports[key] = ladder(key, anchor, hs, [s.norm_ledger[key] for s in solutions],
                              target_exponent=exponent, trend=trend, parameter_name='h')
    reports['source_l2'] = ladder('source_l2', 'remainder source o(h^3/2) in L^2', hs,
                                  [s.norm_ledger['source_l2'] for s in solutions],
                                  target_exponent=1.5, parameter_name='h')
    return ReportBundle(name='cgo_ladder', reports=reports)


def manufactured_remainder(chart: CylinderChart, A: OneForm, q: ScalarField, h: float, sign: int,
                           exact: Optional[ScalarField] = None,
                           cache: Optional[OperatorCache] = None) -> Tuple[float, ScalarField]:
    """Relative L2 error of the remainder solve against a smooth field with zero boundary values"""
    if exact is None:
        X1, R, TH = chart.mesh
        s = [(X - lo) / (hi - lo) for X, (lo, hi) in
             zip((X1, R, TH), (chart.x1_range, chart.r_range, chart.theta_range))]
        exact = ScalarField(chart, np.sin(np.pi * s[0]) * np.sin(np.pi * s[1]) * np.sin(np.pi * s[2])
                            * (1.0 + 0.5j * np.cos(np.pi * s[0])))
    if np.max(np.abs(exact.values[chart.boundary_mask])) > 1e-12:
        raise ParameterError("manufactured remainder must vanish on the boundary")
    operator = cgo_operator(chart, A, q, h, sign, cache)
    v = operator.apply(exact)
    r, _ = solve_remainder(chart, A, q, h, sign, v, cache=cache)
    error = lp_norm(chart, r - exact) / lp_norm(chart, exact)
    return error, r


def transport_refinement(chart: CylinderChart, A_builder: Callable[[CylinderChart], OneForm], h: float, sign: int,
                         lam: float, b: ThetaProfile, grid_list: Sequence[Tuple[int, int, int]],
                         kappa: float = DEFAULT_KAPPA, kernel: MollifierKernel = DEFAULT_KERNEL,
                         width: float = DEFAULT_WIDTH) -> Tuple[List[float], List[float], float]:
    """L2 transport residual of the amplitude on successively refined grids; returns (spacings, residuals, order)"""
    spacings, residuals = [], []
    for sizes in grid_list:
        refined = chart.refined(sizes)
        A = A_builder(refined)
        parts = amplitude_parts(refined, A, h, sign, lam, b, kappa, kernel, width)
        residuals.append(lp_norm(refined, transport_residual(refined, parts.amplitude, parts.A_tau, sign)))
        spacings.append(max(refined.spacings[:2]))
    if min(residuals) <= 0:
        return spacings, residuals, float('inf')
    order, _ = np.polyfit(np.log(spacings), np.log(residuals), 1)
    return spacings, residuals, float(order)
