"""
identity/gauge.py - Gauge potentials of closed one-forms and gauge-matched solutions

A closed delta on the box chart is exact; phi is recovered by integrating the
discrete gradient along coordinate lines. Each line integral inverts the same
second-order difference stencil the calculus module differentiates with, so a
delta built as d(phi) comes back as phi up to rounding.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from cgo.solution import CGOSolution
from core.cache import OperatorCache
from core.errors import DomainError, GaugeError
from geometry.boundary import BoundaryRegion, integrate_boundary
from geometry.calculus import (
    _gradient,
    boundary_index,
    differential,
    exterior_derivative,
    flat,
    gradient_rows,
    interior_index,
    laplace_rows,
    magnetic_apply,
)
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, VectorField, require_same_chart
from geometry.quadrature import lp_norm
from geometry.transforms import advection_to_magnetic

log = logging.getLogger(__name__)

DEFAULT_CLOSED_TOL = 1e-6
DEFAULT_PATH_TOL = 1e-8
DEFAULT_BOUNDARY_TOL = 1e-8


@lru_cache(maxsize=32)
def _antiderivative(n: int, spacing: float) -> np.ndarray:
    """Matrix P with D (P g) = g for g in the range of the gradient stencil D, and (P g)[0] = 0"""
    D = _gradient(np.eye(n), spacing, 0)
    P = np.zeros((n, n))
    P[1:, :] = np.linalg.pinv(D[:, 1:])
    P.setflags(write=False)
    return P


def _integrate_line(values: np.ndarray, spacing: float, axis: int) -> np.ndarray:
    P = _antiderivative(values.shape[axis], float(spacing))
    return np.moveaxis(np.tensordot(P, np.moveaxis(values, axis, 0), axes=(1, 0)), 0, axis)


def _path_integral(chart: CylinderChart, delta: OneForm, order: Sequence[int]) -> np.ndarray:
    """
    phi from the base corner: integrate along order[0] on the base line, then
    along order[1] from that line, then along order[2] from that plane.
    """
    phi = np.zeros((1, 1, 1), dtype=complex)
    for step, axis in enumerate(order):
        index = [slice(None)] * 3
        for k in order[step + 1:]:
            index[k] = slice(0, 1)
        phi = phi + _integrate_line(delta[axis][tuple(index)], chart.spacings[axis], axis)
    return phi


def closedness(chart: CylinderChart, delta: OneForm) -> float:
    return float(max(np.max(np.abs(c)) for c in exterior_derivative(chart, delta)))


def tangential_boundary_max(region: BoundaryRegion, delta: OneForm) -> float:
    """max |delta| over the components tangential to each boundary face"""
    out = 0.0
    for face in region.faces:
        for k in range(3):
            if k != face.axis:
                out = max(out, float(np.max(np.abs(face.restrict(delta[k])))))
    return out


def gauge_potential(chart: CylinderChart, delta: OneForm, closed_tol: float = DEFAULT_CLOSED_TOL,
                    path_tol: float = DEFAULT_PATH_TOL, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> ScalarField:
    """
    phi with d phi = delta and zero boundary mean.

    Raises DomainError when delta is not closed or the two path orders disagree,
    and GaugeError when delta has no tangential part on the boundary but phi
    does not vanish there.
    """
    require_same_chart(chart, delta)
    scale = max(1.0, float(max(np.max(np.abs(c)) for c in delta)))
    curl = closedness(chart, delta)
    if curl > closed_tol * scale:
        raise DomainError(f"one-form is not closed: max |d delta| = {curl:.3e}", measured=curl)

    first = _path_integral(chart, delta, (0, 1, 2))
    second = _path_integral(chart, delta, (2, 1, 0))
    mismatch = float(np.max(np.abs(first - second)))
    if mismatch > path_tol * scale:
        raise DomainError(f"path orders disagree by {mismatch:.3e}", measured=mismatch)

    region = BoundaryRegion.build(chart)
    mean = integrate_boundary(region, first) / region.area()
    values = first - mean
    if delta.is_real:
        values = values.real

    tangential = tangential_boundary_max(region, delta)
    boundary = float(np.max(np.abs(values[chart.boundary_mask])))
    if tangential <= boundary_tol and boundary > boundary_tol:
        raise GaugeError(f"gauge potential reaches {boundary:.3e} on the boundary")
    log.debug("gauge potential: |d delta|=%.2e path mismatch=%.2e max|phi| on boundary=%.2e",
              curl, mismatch, boundary)
    return ScalarField(chart, values)


@dataclass(frozen=True, eq=False)
class GaugeMatchedSolution:
    """w2 = e^{-i phi} u1 kept in the factored form e^{sign rho/h} e^{-i phi} W1"""
    base: CGOSolution
    phi: ScalarField

    @property
    def chart(self) -> CylinderChart:
        return self.base.chart

    @property
    def sign(self) -> int:
        return self.base.sign

    @property
    def h(self) -> float:
        return self.base.h

    @property
    def W(self) -> ScalarField:
        return self.base.W * np.exp(-1j * self.phi.values)

    @property
    def G(self) -> ScalarField:
        """(e^{-i phi} - 1) W1, so w2 - u1 = e^{sign rho/h} G"""
        return self.base.W * (np.exp(-1j * self.phi.values) - 1.0)

    def field(self) -> ScalarField:
        return self.base.field() * np.exp(-1j * self.phi.values)


def _check_boundary(chart: CylinderChart, phi: ScalarField, tol: float):
    boundary = float(np.max(np.abs(phi.values[chart.boundary_mask])))
    if boundary > tol:
        raise GaugeError(f"max |phi| on the boundary is {boundary:.3e} (tolerance {tol:.1e})")


def gauge_matched_solution(u1: Union[CGOSolution, ScalarField], phi: ScalarField,
                           tol: float = DEFAULT_BOUNDARY_TOL) -> Union[GaugeMatchedSolution, ScalarField]:
    """w2 = e^{-i phi} u1; equal to u1 on the boundary"""
    chart = require_same_chart(u1, phi)
    _check_boundary(chart, phi, tol)
    if isinstance(u1, CGOSolution):
        return GaugeMatchedSolution(base=u1, phi=phi)
    return u1 * np.exp(-1j * phi.values)


def conjugation_defect(chart: CylinderChart, A: OneForm, q: ScalarField, phi: ScalarField, u: ScalarField,
                       mask: Optional[np.ndarray] = None) -> float:
    """relative L2 gap between L_{A + d phi, q}(e^{-i phi} u) and e^{-i phi} L_{A,q} u"""
    require_same_chart(chart, A, q, phi, u)
    gauge = np.exp(-1j * phi.values)
    lhs = magnetic_apply(chart, A + differential(chart, phi), q, u * gauge)
    rhs = magnetic_apply(chart, A, q, u) * gauge
    mask = chart.interior_mask if mask is None else mask
    scale = lp_norm(chart, rhs, mask=mask)
    gap = lp_norm(chart, lhs - rhs, mask=mask)
    return gap / scale if scale > 0 else gap


@dataclass(frozen=True)
class AdvectionCertificate:
    """
    Dirichlet solution w driven by the electric difference, against the gauge
    potential psi of X2_flat - X1_flat. Equal fields give w = 0.
    """
    psi: ScalarField
    w: ScalarField
    psi_max: float
    psi_boundary_max: float
    source_max: float
    w_max: float
    gap_max: float

    def passed(self, tol: float) -> bool:
        """X1 = X2 is certified when w vanishes"""
        return self.w_max <= tol


def advection_certificate(chart: CylinderChart, X1: VectorField, X2: VectorField,
                          dq: Optional[ScalarField] = None, closed_tol: float = DEFAULT_CLOSED_TOL,
                          path_tol: float = DEFAULT_PATH_TOL,
                          cache: Optional[OperatorCache] = None) -> AdvectionCertificate:
    """
    With X2_flat = X1_flat + d psi the electric parts differ by

        -Lap psi + 1/2 <(X1 + X2)_flat, d psi> = -2 (q1 - q2),

    so w solving this with the source ``dq = q1 - q2`` and w = psi on the
    boundary reproduces psi. Equal data (dq = 0) and a gauge potential that
    vanishes on the boundary leave only w = 0, hence X1 = X2. ``dq`` defaults
    to the exact difference of the reduced electric potentials; pass a
    recovered estimate to certify from data.
    """
    require_same_chart(chart, X1, X2)
    psi = gauge_potential(chart, flat(chart, X2) - flat(chart, X1), closed_tol=closed_tol, path_tol=path_tol,
                          boundary_tol=np.inf)
    if dq is None:
        dq = advection_to_magnetic(chart, X1)[1] - advection_to_magnetic(chart, X2)[1]
    require_same_chart(chart, dq)

    mean_field = (X1 + X2) * 0.5
    interior = chart.interior_mask
    rows = -laplace_rows(chart, cache)
    for axis in range(3):
        coefficient = mean_field[axis][interior].ravel()
        rows = rows + sp.diags(coefficient) @ gradient_rows(chart, axis, cache)
    rows = rows.tocsc()
    inner_cols, outer_cols = interior_index(chart), boundary_index(chart)
    boundary_values = psi.values.ravel()[outer_cols]
    source = -2.0 * dq.values[interior].ravel()

    w = np.zeros(chart.node_count, dtype=complex)
    w[outer_cols] = boundary_values
    w[inner_cols] = spla.spsolve(rows[:, inner_cols], source - rows[:, outer_cols] @ boundary_values)
    w = ScalarField(chart, w.reshape(chart.shape))
    certificate = AdvectionCertificate(
        psi=psi, w=w,
        psi_max=float(np.max(np.abs(psi.values))),
        psi_boundary_max=float(np.max(np.abs(boundary_values))),
        source_max=float(np.max(np.abs(source))) if source.size else 0.0,
        w_max=float(np.max(np.abs(w.values))),
        gap_max=float(np.max(np.abs(w.values - psi.values))),
    )
    log.info("advection certificate: max|psi|=%.3e max|w|=%.3e max|w - psi|=%.3e max|source|=%.3e",
             certificate.psi_max, certificate.w_max, certificate.gap_max, certificate.source_max)
    return certificate
