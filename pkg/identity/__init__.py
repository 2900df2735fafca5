# ===========================================
# identity/__init__.py
# ===========================================
"""Green formula, gauge matching and the partial-data integral identity"""

from .functionals import (
    boundary_rhs,
    boundary_terms,
    electric_data,
    integral_identity_lhs,
    magnetic_limit_functional,
)
from .gauge import GaugeMatchedSolution, gauge_matched_solution, gauge_potential
from .green import green_residual
from .scenarios import ScenarioKind, ScenarioPair

__all__ = ['ScenarioKind', 'ScenarioPair', 'green_residual', 'gauge_potential', 'gauge_matched_solution',
           'GaugeMatchedSolution', 'integral_identity_lhs', 'boundary_terms', 'boundary_rhs',
           'magnetic_limit_functional', 'electric_data']
