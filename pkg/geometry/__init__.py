# ===========================================
# geometry/__init__.py
# ===========================================
"""Discrete geometry of the warped-product cylinder"""

from .chart import CylinderChart
from .fields import OneForm, ScalarField, VectorField
from .calculus import (
    codifferential,
    differential,
    flat,
    inner,
    laplace_beltrami,
    magnetic_apply,
    sharp,
)
from .quadrature import integrate_volume, l2_inner, lp_norm
from .boundary import BoundaryFlag, BoundaryRegion, integrate_boundary
from .transforms import advection_apply, advection_to_magnetic, log_polar_map

__all__ = [
    'CylinderChart',
    'ScalarField',
    'OneForm',
    'VectorField',
    'differential',
    'codifferential',
    'laplace_beltrami',
    'inner',
    'sharp',
    'flat',
    'magnetic_apply',
    'integrate_volume',
    'l2_inner',
    'lp_norm',
    'BoundaryFlag',
    'BoundaryRegion',
    'integrate_boundary',
    'log_polar_map',
    'advection_to_magnetic',
    'advection_apply',
]
