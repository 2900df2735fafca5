# ===========================================
# utils/presets.py - Named charts, coefficients and scenarios
# ===========================================
"""
Closed-form catalogue selectable by name from the experiment config.

Every coefficient preset is a function of the chart so it can be resampled on
refined grids; gauge potentials vanish on every face of the box.
"""

import logging
from typing import Callable, Dict, Tuple

import numpy as np

from core.errors import ConfigurationError
from geometry.calculus import differential, sharp
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, VectorField
from identity.scenarios import ScenarioPair

log = logging.getLogger(__name__)

DEFAULT_GRID = (17, 17, 9)
DEFAULT_THETA = (-np.pi / 6, np.pi / 6)


def _exp_warp(x1, r, theta):
    return np.exp(2.0 * x1)


CHARTS: Dict[str, dict] = {
    'flat-cylinder': {'x1_range': (0.0, 1.0), 'r_range': (1.0, 3.0), 'warp_fn': None},
    'exp-warp': {'x1_range': (0.0, 1.0), 'r_range': (1.0, 3.0), 'warp_fn': _exp_warp},
    # image of the shell e^-1/2 <= |x| <= e^1/2 under y1 = log|x|
    'log-polar-image': {'x1_range': (-0.5, 0.5), 'r_range': (1.0, 3.0), 'warp_fn': _exp_warp},
}


def scaled_grid(grid: Tuple[int, int, int], scale: float) -> Tuple[int, int, int]:
    """Grid sizes multiplied by ``scale``, keeping odd node counts so the chart centre is a node"""
    out = []
    for n in grid:
        m = max(3, int(round((n - 1) * scale)) + 1)
        out.append(m if m % 2 else m + 1)
    return tuple(out)


def build_chart(name: str, grid: Tuple[int, int, int] = DEFAULT_GRID, grid_scale: float = 1.0) -> CylinderChart:
    if name not in CHARTS:
        raise ConfigurationError(f"unknown chart preset {name!r}; expected one of {sorted(CHARTS)}")
    entry = CHARTS[name]
    sizes = scaled_grid(grid, grid_scale) if grid_scale != 1.0 else tuple(grid)
    return CylinderChart.build(entry['x1_range'], entry['r_range'], DEFAULT_THETA, sizes,
                               warp_fn=entry['warp_fn'], name=name)


# --- relative position in the box, used by fields that vanish on the faces ---

def _unit(chart: CylinderChart):
    X1, R, TH = chart.mesh
    return [(X - lo) / (hi - lo) for X, (lo, hi) in
            zip((X1, R, TH), (chart.x1_range, chart.r_range, chart.theta_range))]


# --- magnetic potentials ---

def _potential_zero(chart):
    return OneForm.zeros(chart)


def _potential_smooth(chart):
    X1, R, TH = chart.mesh
    return OneForm(chart, 0.3 * np.cos(np.pi * X1) * R / 2.0, 0.2 * X1 * R, 0.1 * np.sin(TH) * R ** 2)


def _potential_rough(chart):
    """Lipschitz but not C^1: kinks across x1 = 1/2 and r = 2"""
    X1, R, TH = chart.mesh
    return OneForm(chart, 0.5 * np.abs(X1 - 0.5) + 0.1, 0.3 * np.maximum(R - 2.0, 0.0),
                   0.1 * np.abs(np.sin(3.0 * TH)) * R)


def _potential_theta_shear(chart):
    X1, R, _ = chart.mesh
    return OneForm(chart, np.zeros(chart.shape), np.zeros(chart.shape), 0.2 * X1 * R)


POTENTIALS: Dict[str, Callable[[CylinderChart], OneForm]] = {
    'zero': _potential_zero,
    'smooth': _potential_smooth,
    'rough-kink': _potential_rough,
    'theta-shear': _potential_theta_shear,
}


# --- electric potentials ---

def _electric_zero(chart):
    return ScalarField.zeros(chart)


def _electric_bump(chart):
    X1, R, TH = chart.mesh
    return ScalarField(chart, np.exp(-((X1 - 0.5) ** 2 + (R - 2.0) ** 2) / (2 * 0.3 ** 2) - TH ** 2 / (2 * 0.25 ** 2)))


def _electric_rough(chart):
    X1, R, _ = chart.mesh
    return ScalarField(chart, 1.0 - np.abs(X1 - 0.5) - 0.5 * np.abs(R - 2.0))


ELECTRIC: Dict[str, Callable[[CylinderChart], ScalarField]] = {
    'zero': _electric_zero,
    'smooth-bump': _electric_bump,
    'rough-kink': _electric_rough,
}


# --- advection fields (contravariant components) ---

def _field_zero(chart):
    return VectorField.zeros(chart)


def _field_unit_x1(chart):
    return VectorField(chart, np.ones(chart.shape), np.zeros(chart.shape), np.zeros(chart.shape))


def _field_swirl(chart):
    X1, R, _ = chart.mesh
    return VectorField(chart, -0.5 * (R - 2.0), 0.5 * (X1 - 0.5), 0.1 * np.ones(chart.shape))


VECTOR_FIELDS: Dict[str, Callable[[CylinderChart], VectorField]] = {
    'zero': _field_zero,
    'unit-x1': _field_unit_x1,
    'swirl': _field_swirl,
}


# --- gauge potentials, zero on every face ---

def _gauge_sine(chart, amplitude=0.2):
    s = _unit(chart)
    return ScalarField(chart, amplitude * np.sin(np.pi * s[0]) * np.sin(np.pi * s[1]) * np.sin(np.pi * s[2]))


def _gauge_bubble(chart, amplitude=0.2):
    s = _unit(chart)
    X1, R, _ = chart.mesh
    envelope = np.exp(-((X1 - 0.6) ** 2 + (R - 1.8) ** 2))
    return ScalarField(chart, amplitude * envelope * np.sin(np.pi * s[0]) * np.sin(np.pi * s[1]) * np.sin(np.pi * s[2]))


def _gauge_poly(chart, amplitude=0.2):
    s = _unit(chart)
    return ScalarField(chart, 64.0 * amplitude * np.prod([t * (1.0 - t) for t in s], axis=0))


GAUGES: Dict[str, Callable[[CylinderChart], ScalarField]] = {
    'gauge-sine': _gauge_sine,
    'gauge-bubble': _gauge_bubble,
    'gauge-poly': _gauge_poly,
}

SCENARIOS = tuple(GAUGES) + ('generic-shear',)


def _lookup(table: dict, kind: str, name: str):
    if name not in table:
        raise ConfigurationError(f"unknown {kind} preset {name!r}; expected one of {sorted(table)}")
    return table[name]


def potential(chart: CylinderChart, name: str) -> OneForm:
    return _lookup(POTENTIALS, 'potential', name)(chart)


def electric(chart: CylinderChart, name: str) -> ScalarField:
    return _lookup(ELECTRIC, 'electric', name)(chart)


def vector_field(chart: CylinderChart, name: str) -> VectorField:
    return _lookup(VECTOR_FIELDS, 'vector field', name)(chart)


def gauge_shift(chart: CylinderChart, name: str) -> VectorField:
    """grad phi of a gauge preset, a shift of an advection field by an exact one-form"""
    return sharp(chart, differential(chart, _lookup(GAUGES, 'gauge', name)(chart)))


def scenario(chart: CylinderChart, name: str, A1: str = 'smooth', q1: str = 'smooth-bump') -> ScenarioPair:
    """Gauge presets shift A1 by d phi; 'generic-shear' adds a non-exact f(x1, r) dtheta and a bump to q"""
    base_A, base_q = potential(chart, A1), electric(chart, q1)
    if name in GAUGES:
        return ScenarioPair.gauge(chart, base_A, base_q, GAUGES[name](chart), name=name)
    if name == 'generic-shear':
        return ScenarioPair.generic(chart, base_A, base_q, base_A - potential(chart, 'theta-shear'),
                                    base_q + electric(chart, 'smooth-bump') * 0.5, name=name)
    raise ConfigurationError(f"unknown scenario preset {name!r}; expected one of {list(SCENARIOS)}")
