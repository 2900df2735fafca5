# ===========================================
# carleman/__init__.py
# ===========================================
"""Conjugated operators and discrete Carleman estimate checks"""

from .weights import ConjugatedOperator, ConvexifiedWeight, conjugate_apply
from .estimates import (
    boundary_split,
    carleman_check_boundary,
    carleman_check_interior,
    hminus1_scl_norm,
)

__all__ = ['ConvexifiedWeight', 'ConjugatedOperator', 'conjugate_apply', 'boundary_split',
           'carleman_check_boundary', 'carleman_check_interior', 'hminus1_scl_norm']
