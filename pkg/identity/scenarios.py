"""
identity/scenarios.py - Coefficient pairs (A1, q1), (A2, q2) on a shared chart
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from core.errors import DomainError, GaugeError
from geometry.calculus import differential, exterior_derivative
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart

log = logging.getLogger(__name__)


class ScenarioKind(Enum):
    GAUGE = 'gauge'
    GENERIC = 'generic'


def exterior_norm(chart: CylinderChart, alpha: OneForm) -> float:
    """max over nodes and components of |d alpha|"""
    return float(max(np.max(np.abs(c)) for c in exterior_derivative(chart, alpha)))


@dataclass(frozen=True, eq=False)
class ScenarioPair:
    chart: CylinderChart
    A1: OneForm
    q1: ScalarField
    A2: OneForm
    q2: ScalarField
    kind: ScenarioKind = ScenarioKind.GENERIC
    phi: Optional[ScalarField] = None
    name: str = 'custom'

    def __post_init__(self):
        require_same_chart(self.chart, self.A1, self.q1, self.A2, self.q2)
        if self.kind is ScenarioKind.GAUGE and self.phi is None:
            raise DomainError("a gauge scenario needs its potential phi")

    @classmethod
    def gauge(cls, chart: CylinderChart, A1: OneForm, q1: ScalarField, phi: ScalarField,
              tol: float = 1e-10, name: str = 'gauge') -> 'ScenarioPair':
        """A2 = A1 + d phi, q2 = q1; phi must vanish on every boundary face"""
        require_same_chart(chart, A1, q1, phi)
        boundary = float(np.max(np.abs(phi.values[chart.boundary_mask])))
        if boundary > tol:
            raise GaugeError(f"gauge potential does not vanish on the boundary (max |phi| = {boundary:.3g})")
        A2 = A1 + differential(chart, phi)
        return cls(chart=chart, A1=A1, q1=q1, A2=A2, q2=q1, kind=ScenarioKind.GAUGE, phi=phi, name=name)

    @classmethod
    def generic(cls, chart: CylinderChart, A1: OneForm, q1: ScalarField, A2: OneForm, q2: ScalarField,
                name: str = 'generic') -> 'ScenarioPair':
        return cls(chart=chart, A1=A1, q1=q1, A2=A2, q2=q2, kind=ScenarioKind.GENERIC, name=name)

    @property
    def delta(self) -> OneForm:
        """A1 - A2"""
        return self.A1 - self.A2

    @property
    def dq(self) -> ScalarField:
        return self.q1 - self.q2

    @property
    def is_gauge(self) -> bool:
        return self.kind is ScenarioKind.GAUGE

    def curl_norm(self) -> float:
        """||d(A1 - A2)||_inf"""
        return exterior_norm(self.chart, self.delta)
