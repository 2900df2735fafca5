"""
cgo/remainder.py - Remainder source v = -P a and the Dirichlet solve P r = v

P is the magnetic operator conjugated by the complex phase psi = -sign * rho,
with A replaced by sign * A (the sign -1 branch solves the transpose
L_{-A,q} = L^t_{A,q}).
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from carleman.weights import ConjugatedOperator
from cgo.amplitude import DEFAULT_KAPPA, complex_phase, phase_differential, regularization_scale
from core.cache import OperatorCache
from core.errors import ParameterError
from geometry.calculus import inner
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from geometry.quadrature import hscl_norm, lp_norm

log = logging.getLogger(__name__)

SOURCE_TERMS = ('laplacian', 'cross', 'regularization', 'codifferential', 'potential', 'transport')


def cgo_operator(chart: CylinderChart, A: OneForm, q: ScalarField, h: float, sign: int,
                 cache: Optional[OperatorCache] = None) -> ConjugatedOperator:
    """e^{-sign rho/h} (h^2 L_{sign A, q}) e^{sign rho/h}"""
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign}")
    psi = complex_phase(chart) * (-sign)
    dpsi = phase_differential(chart) * (-sign)
    return ConjugatedOperator(chart, A * sign, q, h, psi=psi, dpsi=dpsi, cache=cache)


def remainder_source(chart: CylinderChart, A: OneForm, A_tau: OneForm, q: ScalarField, a: ScalarField, h: float,
                     sign: int = 1, tau: Optional[float] = None, kappa: float = DEFAULT_KAPPA,
                     include_transport: bool = False,
                     cache: Optional[OperatorCache] = None) -> Tuple[ScalarField, Dict[str, float]]:
    """
    v = -(-h^2 Lap a - 2i h^2 <A, da> + 2i h <A - A_tau, drho> a + i h^2 (d*A) a + h^2 (<A,A> + q) a)
    up to the sign conventions of the branch. ``include_transport`` adds the
    discrete transport defect h T(a) of the amplitude; its norm is reported
    either way. Returns v and the termwise L2 norms.
    """
    require_same_chart(chart, A, A_tau, q, a)
    if tau is not None:
        expected = regularization_scale(h, kappa)
        if not np.isclose(tau, expected, rtol=1e-9, atol=0.0):
            raise ParameterError(f"tau = {tau} does not pair with h = {h} (expected kappa sqrt(h) = {expected:.6g})")
    operator = cgo_operator(chart, A, q, h, sign, cache)
    parts = operator.termwise(a, ('laplacian', 'cross', 'codifferential', 'potential',
                                  'gradient', 'eikonal', 'weight_laplacian'))
    dpsi = operator.dpsi
    regularization = 2j * h * inner(chart, (A - A_tau) * sign, dpsi).values * a.values
    smooth_magnetic = 2j * h * inner(chart, A_tau * sign, dpsi).values * a.values
    transport = parts['gradient'].values + parts['eikonal'].values + parts['weight_laplacian'].values + smooth_magnetic

    terms = {
        'laplacian': parts['laplacian'].values,
        'cross': parts['cross'].values,
        'regularization': regularization,
        'codifferential': parts['codifferential'].values,
        'potential': parts['potential'].values,
        'transport': transport,
    }
    total = sum(values for name, values in terms.items() if include_transport or name != 'transport')
    norms = {name: lp_norm(chart, values) for name, values in terms.items()}
    v = ScalarField(chart, -total)
    norms['total'] = lp_norm(chart, v)
    log.debug("remainder source h=%.4g: %s", h, {k: f"{n:.3e}" for k, n in norms.items()})
    return v, norms


def solve_remainder(chart: CylinderChart, A: OneForm, q: ScalarField, h: float, sign: int, v: ScalarField,
                    estimate_condition: bool = False,
                    cache: Optional[OperatorCache] = None) -> Tuple[ScalarField, Dict[str, float]]:
    """r with P r = v at interior nodes and r = 0 on the boundary; norms include ||r||_{H^1_scl}"""
    require_same_chart(chart, A, q, v)
    operator = cgo_operator(chart, A, q, h, sign, cache)
    r = operator.solve(v)
    interior = chart.interior_mask
    defect = operator.apply(r).values[interior] - v.values[interior]
    scale = float(np.linalg.norm(v.values[interior]))
    norms = {
        'remainder_hscl': hscl_norm(chart, r, h),
        'remainder_l2': lp_norm(chart, r),
        'relative_residual': float(np.linalg.norm(defect) / scale) if scale > 0 else 0.0,
    }
    if estimate_condition:
        norms['condition'] = operator.condition_estimate()
    log.debug("remainder h=%.4g sign=%+d: ||r||_H1scl=%.4e", h, sign, norms['remainder_hscl'])
    return r, norms
