"""
mollify/rates.py - Measured convergence ladders for mollified functions and one-forms
"""

import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from core.errors import ParameterError
from core.report import ReportBundle, ladder
from geometry.calculus import (
    _gradient,
    christoffel,
    covariant_derivative,
    differential,
    second_covariant_derivative,
    sharp,
    tensor_norm,
)
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField
from geometry.quadrature import distance_to_faces, lp_norm
from mollify.kernel import DEFAULT_KERNEL, MollifierKernel, mollify, regularize_one_form

log = logging.getLogger(__name__)

REGIONS = ('chart', 'interior')


def _plateau(x1, r, theta):
    return np.clip((x1 - 0.3) / 0.4, 0.0, 1.0)


# Built-in corpus: smooth, kinked (W^{1,inf}), and plateaued (Lipschitz step)
CORPUS: Dict[str, Callable] = {
    'smooth': lambda x1, r, theta: np.cos(np.pi * x1) * r,
    'kinked': lambda x1, r, theta: np.abs(x1 - 0.5),
    'plateau': _plateau,
}


def _validate_ladder(tau_list: Sequence[float]) -> np.ndarray:
    taus = np.asarray(tau_list, dtype=float)
    if taus.ndim != 1 or taus.size < 2:
        raise ParameterError(f"tau ladder needs at least two rungs, got {tau_list}")
    if np.any(np.diff(taus) >= 0):
        raise ParameterError(f"tau ladder must be strictly decreasing, got {list(tau_list)}")
    return taus


def region_mask(chart: CylinderChart, region: str, tau_max: float) -> Optional[np.ndarray]:
    """None for the whole chart; else the nodes farther than tau_max from every face"""
    if region == 'chart':
        return None
    if region == 'interior':
        mask = distance_to_faces(chart) > tau_max
        if not mask.any():
            raise ParameterError(f"no node lies farther than tau_max = {tau_max} from the faces")
        return mask
    raise ParameterError(f"unknown region {region!r}; expected one of {REGIONS}")


def hessian_norm(chart: CylinderChart, u: ScalarField, gamma: Optional[np.ndarray] = None) -> np.ndarray:
    """Pointwise metric norm of the covariant Hessian d_j d_k u - Gamma^i_jk d_i u"""
    gamma = christoffel(chart) if gamma is None else gamma
    du = differential(chart, u)
    total = np.zeros(chart.shape)
    for j in range(3):
        for k in range(3):
            second = _gradient(du[k], chart.spacings[j], j)
            hess = second - sum(gamma[i, j, k] * du[i] for i in range(3))
            total += chart.inverse_metric_diagonal[j] * chart.inverse_metric_diagonal[k] * np.abs(hess) ** 2
    return np.sqrt(total)


def rate_study_Lp(f: ScalarField, p: float, tau_list: Sequence[float],
                  kernel: MollifierKernel = DEFAULT_KERNEL, region: str = 'chart',
                  bound_factor: float = 2.0) -> ReportBundle:
    """
    Three trends across a tau-halving ladder:

    - ||f_tau - f||_p / tau decreasing
    - tau ||grad^2 f_tau||_p decreasing
    - tau^k ||grad^k f_tau||_inf bounded, k = 1, 2
    """
    taus = _validate_ladder(tau_list)
    chart = f.chart
    tau_max = float(taus[0])
    mask = region_mask(chart, region, tau_max)
    gamma = christoffel(chart)

    approximation, second, sup_first, sup_second = [], [], [], []
    for tau in taus:
        f_tau = mollify(f, float(tau), kernel, tau_max=tau_max)
        approximation.append(lp_norm(chart, f_tau - f, p, mask))
        hess = hessian_norm(chart, f_tau, gamma)
        second.append(lp_norm(chart, hess, p, mask))
        sup_first.append(lp_norm(chart, differential(chart, f_tau), np.inf, mask))
        sup_second.append(lp_norm(chart, hess, np.inf, mask))
        log.debug("tau=%.4g: ||f_tau - f||_%s=%.4g", tau, p, approximation[-1])

    reports = {
        'approximation': ladder('approximation', 'mollifier approximation o(tau) in L^p',
                                taus, approximation, target_exponent=1.0),
        'second_derivative': ladder('second_derivative', 'mollified Hessian o(1/tau) in L^p',
                                    taus, second, target_exponent=-1.0),
        'sup_k1': ladder('sup_k1', 'mollified gradient O(1/tau) in L^inf',
                         taus, sup_first, target_exponent=-1.0, trend='bounded', bound_factor=bound_factor),
        'sup_k2': ladder('sup_k2', 'mollified Hessian O(1/tau^2) in L^inf',
                         taus, sup_second, target_exponent=-2.0, trend='bounded', bound_factor=bound_factor),
    }
    return ReportBundle(name=f'rate_study_L{p:g}', reports=reports)


def regularization_rates(A: OneForm, tau_list: Sequence[float], kernel: MollifierKernel = DEFAULT_KERNEL,
                         region: str = 'chart', bound_factor: float = 2.0) -> ReportBundle:
    """Ladders for A_tau: ||A - A_tau||_{L^3}/tau, tau ||nabla^2 A_tau^sharp||_{L^3}, sup norms of nabla^k A_tau^sharp"""
    taus = _validate_ladder(tau_list)
    chart = A.chart
    tau_max = float(taus[0])
    mask = region_mask(chart, region, tau_max)
    gamma = christoffel(chart)
    n = chart.dimension

    approximation, second, sup_first, sup_second = [], [], [], []
    for tau in taus:
        A_tau = regularize_one_form(A, float(tau), kernel, tau_max=tau_max)
        approximation.append(lp_norm(chart, A_tau - A, n, mask))
        X = sharp(chart, A_tau)
        first = tensor_norm(chart, covariant_derivative(chart, X, gamma))
        hess = tensor_norm(chart, second_covariant_derivative(chart, X, gamma))
        second.append(lp_norm(chart, hess, n, mask))
        sup_first.append(lp_norm(chart, first, np.inf, mask))
        sup_second.append(lp_norm(chart, hess, np.inf, mask))

    reports = {
        'approximation': ladder('approximation', 'regularized potential o(tau) in L^n',
                                taus, approximation, target_exponent=1.0),
        'second_covariant': ladder('second_covariant', 'second covariant derivative o(1/tau) in L^n',
                                   taus, second, target_exponent=-1.0),
        'sup_k1': ladder('sup_k1', 'covariant derivative O(1/tau) in L^inf',
                         taus, sup_first, target_exponent=-1.0, trend='bounded', bound_factor=bound_factor),
        'sup_k2': ladder('sup_k2', 'second covariant derivative O(1/tau^2) in L^inf',
                         taus, sup_second, target_exponent=-2.0, trend='bounded', bound_factor=bound_factor),
    }
    return ReportBundle(name='regularization_rates', reports=reports)
