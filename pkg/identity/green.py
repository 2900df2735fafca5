"""
identity/green.py - Magnetic Green formula by volume and boundary quadrature

    (L_{A,q} u, v) - (u, L_{conj A, conj q} v)
        = -int (d_nu u + i <A, nu> u) conj(v) dS + int u conj(d_nu v + i <conj A, nu> v) dS
"""

from typing import Optional, Tuple

import numpy as np

from geometry.boundary import BoundaryRegion, integrate_boundary
from geometry.calculus import magnetic_apply
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from geometry.quadrature import l2_inner


def green_sides(chart: CylinderChart, A: OneForm, q: ScalarField, u: ScalarField, v: ScalarField,
                region: Optional[BoundaryRegion] = None) -> Tuple[complex, complex]:
    require_same_chart(chart, A, q, u, v)
    region = BoundaryRegion.build(chart) if region is None else region
    lhs = (l2_inner(chart, magnetic_apply(chart, A, q, u), v)
           - l2_inner(chart, u, magnetic_apply(chart, A.conj(), q.conj(), v)))

    def integrand(face):
        conormal_u = face.normal_derivative(chart, u.values) + 1j * face.normal_component(chart, A) * face.restrict(u.values)
        conormal_v = (face.normal_derivative(chart, v.values)
                      + 1j * face.normal_component(chart, A.conj()) * face.restrict(v.values))
        return -conormal_u * np.conj(face.restrict(v.values)) + face.restrict(u.values) * np.conj(conormal_v)

    rhs = integrate_boundary(region, integrand)
    return lhs, rhs


def green_residual(chart: CylinderChart, A: OneForm, q: ScalarField, u: ScalarField, v: ScalarField,
                   region: Optional[BoundaryRegion] = None) -> float:
    """|LHS - RHS| of the magnetic Green formula"""
    lhs, rhs = green_sides(chart, A, q, u, v, region)
    return float(abs(lhs - rhs))
