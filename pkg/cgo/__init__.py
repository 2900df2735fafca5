# ===========================================
# cgo/__init__.py
# ===========================================
"""Complex geometrical optics solutions"""

from .amplitude import ThetaProfile, build_amplitude, eikonal_residual, holomorphic_residual
from .remainder import remainder_source, solve_remainder
from .solution import CGOSolution, build_cgo, cgo_ladder

__all__ = ['ThetaProfile', 'build_amplitude', 'eikonal_residual', 'holomorphic_residual',
           'remainder_source', 'solve_remainder', 'CGOSolution', 'build_cgo', 'cgo_ladder']
