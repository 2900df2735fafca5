# ===========================================
# dbar/__init__.py
# ===========================================
"""Cauchy-kernel solver for the d-bar equation and CGO phase corrections"""

from .cauchy import CauchyKernelGrid, cauchy_transform, dbar
from .phase import pair_phase, phase_correction, phase_estimates, phase_ladder

__all__ = ['CauchyKernelGrid', 'cauchy_transform', 'dbar',
           'phase_correction', 'pair_phase', 'phase_estimates', 'phase_ladder']
