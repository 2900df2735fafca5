"""
identity/functionals.py - The partial-data integral identity, its boundary terms and the limit functionals

CGO pairs enter through their factored form u = e^{sign rho/h} W. For a pair
of opposite signs the exponentials cancel:

    u1 u2 = W1 W2
    u1 du2 - u2 du1 = W1 dW2 - W2 dW1 + ((sign2 - sign1)/h) W1 W2 drho
"""

import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np

from cgo.amplitude import complex_phase, phase_differential
from cgo.solution import CGOSolution
from core.errors import DomainError, PairingError, UnsupportedScenarioError
from geometry.boundary import BoundaryRegion, integrate_boundary
from geometry.calculus import differential, inner
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from geometry.quadrature import flat_weights, integrate_volume
from identity.gauge import GaugeMatchedSolution
from identity.scenarios import ScenarioPair

log = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]
Solution = Union[CGOSolution, GaugeMatchedSolution]


def _check_pair(u1: Solution, u2: Solution):
    require_same_chart(u1, u2)
    if u1.sign == u2.sign:
        raise PairingError(f"CGO pair has equal signs ({u1.sign:+d}); the exponentials would not cancel")
    if not np.isclose(u1.h, u2.h):
        raise PairingError(f"CGO pair has different h ({u1.h} vs {u2.h})")


def _products(u1: Solution, u2: Solution, explicit: bool) -> Tuple[np.ndarray, OneForm]:
    """u1 u2 and u1 du2 - u2 du1"""
    chart = u1.chart
    W1, W2 = u1.W, u2.W
    dW1, dW2 = differential(chart, W1), differential(chart, W2)
    if explicit:
        # exponentials formed and multiplied out; finite only at moderate 1/h
        rho = complex_phase(chart).values
        e1 = np.exp(u1.sign * rho / u1.h)
        e2 = np.exp(u2.sign * rho / u2.h)
        drho = phase_differential(chart)
        du1 = (dW1 + drho * (W1 * (u1.sign / u1.h))) * e1
        du2 = (dW2 + drho * (W2 * (u2.sign / u2.h))) * e2
        f1 = W1.values * e1
        f2 = W2.values * e2
        return f1 * f2, du2 * f1 - du1 * f2
    product = W1.values * W2.values
    cross = dW2 * W1 - dW1 * W2 + phase_differential(chart) * ((u2.sign - u1.sign) / u1.h * product)
    return product, cross


def integral_identity_lhs(pair: ScenarioPair, u1: Solution, u2: Solution, explicit: bool = False) -> complex:
    """int i<A1 - A2, u1 du2 - u2 du1> dV + int (<A1,A1> - <A2,A2> + q1 - q2) u1 u2 dV"""
    _check_pair(u1, u2)
    chart = require_same_chart(pair.chart, u1)
    product, cross = _products(u1, u2, explicit)
    magnetic = 1j * inner(chart, pair.delta, cross).values
    electric = (inner(chart, pair.A1, pair.A1).values - inner(chart, pair.A2, pair.A2).values
                + pair.dq.values) * product
    return integrate_volume(chart, magnetic + electric)


def identity_scale(pair: ScenarioPair, u1: Solution, u2: Solution) -> float:
    """L1 magnitude of the identity's integrand, the yardstick for 'matches'"""
    _check_pair(u1, u2)
    chart = pair.chart
    product, cross = _products(u1, u2, explicit=False)
    magnetic = np.abs(inner(chart, pair.delta, cross).values)
    electric = np.abs((inner(chart, pair.A1, pair.A1).values - inner(chart, pair.A2, pair.A2).values
                       + pair.dq.values) * product)
    return float(integrate_volume(chart, magnetic + electric).real)


def _require_gauge(pair: ScenarioPair):
    if not pair.is_gauge:
        raise UnsupportedScenarioError(
            "boundary terms need w2, which is only constructible for gauge scenarios")


def boundary_terms(pair: ScenarioPair, u1: Solution, u2: Solution, w2: GaugeMatchedSolution,
                   region: BoundaryRegion, h: float, selection: str = 'outside_gamma') -> Tuple[complex, complex]:
    """
    (J_h, K_h) with
        J_h = int d_nu(w2 - u1) u2 dS   and   K_h = int <A1 - A2, nu> u1 u2 dS
    over the unmeasured part of the boundary (``selection``), with
    w2 - u1 = e^{sign rho/h} G so that d_nu(w2 - u1) u2 = (d_nu G + G d_nu rho sign/h) W2.
    """
    _require_gauge(pair)
    _check_pair(u1, u2)
    chart = require_same_chart(pair.chart, u1, w2, region)
    if not np.isclose(h, u1.h):
        raise PairingError(f"h = {h} does not match the CGO pair (h = {u1.h})")
    G = w2.G.values
    W1, W2 = u1.W.values, u2.W.values
    drho = phase_differential(chart)
    delta = pair.delta

    def j_integrand(face):
        dG = face.normal_derivative(chart, G)
        drho_nu = face.normal_component(chart, drho)
        return (dG + face.restrict(G) * drho_nu * (u1.sign / h)) * face.restrict(W2)

    def k_integrand(face):
        return face.normal_component(chart, delta) * face.restrict(W1 * W2)

    J = integrate_boundary(region, j_integrand, selection)
    K = integrate_boundary(region, k_integrand, selection)
    log.debug("boundary terms h=%.4g over %s: |J|=%.3e |K|=%.3e", h, selection, abs(J), abs(K))
    return J, K


def boundary_rhs(pair: ScenarioPair, u1: Solution, u2: Solution, w2: GaugeMatchedSolution,
                 region: BoundaryRegion, h: float, selection: str = 'outside_gamma') -> complex:
    """-J + i K; with selection='all' this is the full-boundary right-hand side"""
    J, K = boundary_terms(pair, u1, u2, w2, region, h, selection)
    return -J + 1j * K


def magnetic_integrand(delta: OneForm, Phi: ScalarField, lam: float, b: Profile) -> np.ndarray:
    """<delta, drho> |g|^{-1/2} c e^{i Phi} a0 b on the flat measure dx1 dr dtheta"""
    chart = require_same_chart(delta, Phi)
    X1, R, TH = chart.mesh
    # <delta, drho>_g c = delta_1 + i delta_r, and dV_g |g|^{-1/2} is the flat measure
    a0 = np.exp(1j * lam * (X1 + 1j * R))
    return (delta.component_x1 + 1j * delta.component_r) * np.exp(1j * Phi.values) * a0 * b(TH)


def magnetic_limit_functional(delta: OneForm, Phi: ScalarField, lam: float, b: Profile) -> complex:
    """int <delta, drho>_g |g|^{-1/2} c e^{i Phi} a0 b dV_g"""
    chart = delta.chart
    return complex(np.sum(flat_weights(chart) * magnetic_integrand(delta, Phi, lam, b)))


def magnetic_functional_scale(delta: OneForm, lam: float, b: Profile) -> float:
    """int |<delta, drho>_g| |g|^{-1/2} c |a0 b| dV_g"""
    chart = delta.chart
    X1, R, TH = chart.mesh
    a0 = np.exp(-lam * R)
    modulus = np.abs(delta.component_x1 + 1j * delta.component_r) * np.abs(a0 * b(TH))
    return float(np.sum(flat_weights(chart) * modulus))


def polar_about(chart: CylinderChart, center: complex) -> Tuple[np.ndarray, np.ndarray]:
    """
    (r_omega, theta_omega) of every node, polar coordinates about a transversal
    centre. theta_omega is measured from the direction of the chart's middle
    node so the window seen from an outside centre never wraps.
    """
    _, R, TH = chart.mesh
    points = R * np.exp(1j * TH)
    offset = points - complex(center)
    r_omega = np.abs(offset)
    radius, angle = abs(complex(center)), np.angle(complex(center))
    inside = (chart.r_range[0] <= radius <= chart.r_range[1]
              and chart.theta_range[0] <= angle <= chart.theta_range[1])
    if inside or np.min(r_omega) <= 1e-9:
        raise DomainError(f"polar centre {center} lies in the transversal section of the chart",
                          measured=float(np.min(r_omega)))
    middle = offset[tuple(n // 2 for n in chart.shape)]
    reference = middle / abs(middle)
    return r_omega, np.angle(reference) + np.angle(offset / reference)


def electric_probe(chart: CylinderChart, lam: float, b: Profile, center: Optional[complex] = None) -> np.ndarray:
    """c b(theta_w) e^{i lam (x1 + i r_w)} (r / r_w) times the flat quadrature weight"""
    X1, R, TH = chart.mesh
    if center is None or center == 0:
        r_omega, theta_omega, jacobian = R, TH, 1.0
    else:
        r_omega, theta_omega = polar_about(chart, center)
        jacobian = R / r_omega
    values = chart.warp * b(theta_omega) * np.exp(1j * lam * (X1 + 1j * r_omega)) * jacobian
    return flat_weights(chart) * values


def electric_data(dq: ScalarField, lam: float, b: Profile, center: Optional[complex] = None) -> complex:
    """int (q1 - q2) c b(theta) e^{i lam (x1 + i r)} dx1 dr dtheta"""
    return complex(np.sum(electric_probe(dq.chart, lam, b, center) * dq.values))
