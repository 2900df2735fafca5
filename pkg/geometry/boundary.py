"""
geometry/boundary.py - Faces of the box chart, outward normals and boundary quadrature

Each of the six faces carries its own two-dimensional trapezoid weights for
dS_g. Nodes on edges belong to several faces and contribute once per face,
with that face's normal.
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Tuple, Union

import numpy as np

from core.errors import ParameterError
from geometry.calculus import _gradient
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from geometry.quadrature import trapezoid_weights

log = logging.getLogger(__name__)

SELECTIONS = ('all', 'plus', 'minus', 'gamma', 'outside_gamma')


class BoundaryFlag(IntEnum):
    PLUS = 0
    MINUS = 1
    GAMMA_ONLY = 2


@dataclass(frozen=True, eq=False)
class BoundaryFace:
    axis: int
    side: int
    weights: np.ndarray
    flags: np.ndarray

    @property
    def index(self) -> Tuple:
        index = [slice(None)] * 3
        index[self.axis] = 0 if self.side < 0 else -1
        return tuple(index)

    @property
    def label(self) -> str:
        return f"{('x1', 'r', 'theta')[self.axis]}_{'min' if self.side < 0 else 'max'}"

    def restrict(self, values: np.ndarray) -> np.ndarray:
        return values[self.index]

    def normal_scale(self, chart: CylinderChart) -> np.ndarray:
        """side / sqrt(g_kk) on the face; the unit normal is this times d/dx_k"""
        return self.side / np.sqrt(self.restrict(chart.metric_diagonal[self.axis]))

    def normal_derivative(self, chart: CylinderChart, values: np.ndarray) -> np.ndarray:
        derivative = _gradient(values, chart.spacings[self.axis], self.axis)
        return self.normal_scale(chart) * self.restrict(derivative)

    def normal_component(self, chart: CylinderChart, alpha: OneForm) -> np.ndarray:
        """<a, nu>_g = a(nu)"""
        return self.normal_scale(chart) * self.restrict(alpha[self.axis])

    def mask(self, selection: str) -> np.ndarray:
        if selection == 'all':
            return np.ones(self.flags.shape, dtype=bool)
        if selection == 'plus':
            return self.flags != BoundaryFlag.MINUS
        if selection == 'minus':
            return self.flags == BoundaryFlag.MINUS
        if selection == 'gamma':
            return self.flags != BoundaryFlag.PLUS
        if selection == 'outside_gamma':
            return self.flags == BoundaryFlag.PLUS
        raise ParameterError(f"unknown boundary selection {selection!r}; expected one of {SELECTIONS}")


@dataclass(frozen=True, eq=False)
class BoundaryRegion:
    """
    Partition of the boundary for the limiting weight phi = sign * x1.

    MINUS is the front face F (d_nu phi <= 0, lateral faces included), PLUS the
    back face, GAMMA_ONLY a collar of the back face next to its edges. The
    measurement set is Gamma = MINUS + GAMMA_ONLY, and the unmeasured part of
    the boundary is the PLUS set.
    """
    chart: CylinderChart
    sign: int
    collar_width: float
    faces: Tuple[BoundaryFace, ...]

    @classmethod
    def build(cls, chart: CylinderChart, sign: int = 1, collar_width: float = 0.25) -> 'BoundaryRegion':
        if sign not in (1, -1):
            raise ParameterError(f"sign must be +1 or -1, got {sign}")
        if collar_width < 0:
            raise ParameterError(f"collar width must be nonnegative, got {collar_width}")

        faces = []
        for axis in range(3):
            others = [k for k in range(3) if k != axis]
            w = [trapezoid_weights(chart.shape[k], chart.spacings[k]) for k in others]
            for side in (-1, 1):
                index = [slice(None)] * 3
                index[axis] = 0 if side < 0 else -1
                index = tuple(index)
                c = chart.warp[index]
                J = chart.transversal_density[index]
                density = c if axis == 2 else c * J
                weights = w[0][:, None] * w[1][None, :] * density
                flags = np.full(weights.shape, BoundaryFlag.MINUS, dtype=int)
                if axis == 0 and side * sign > 0:
                    flags[:] = BoundaryFlag.PLUS
                    R = chart.mesh[1][index]
                    TH = chart.mesh[2][index]
                    edge_distance = np.minimum.reduce([R - chart.r_range[0], chart.r_range[1] - R,
                                                       J * (TH - chart.theta_range[0]),
                                                       J * (chart.theta_range[1] - TH)])
                    flags[edge_distance < collar_width] = BoundaryFlag.GAMMA_ONLY
                weights.setflags(write=False)
                flags.setflags(write=False)
                faces.append(BoundaryFace(axis=axis, side=side, weights=weights, flags=flags))

        region = cls(chart=chart, sign=sign, collar_width=float(collar_width), faces=tuple(faces))
        log.debug("boundary split sign=%d collar=%.3g: area(F)=%.4g area(Gamma)=%.4g",
                  sign, collar_width, region.area('minus'), region.area('gamma'))
        return region

    def area(self, selection: str = 'all') -> float:
        return float(sum(np.sum(face.weights * face.mask(selection)) for face in self.faces))

    def face(self, label: str) -> BoundaryFace:
        for face in self.faces:
            if face.label == label:
                return face
        raise KeyError(label)


FaceIntegrand = Callable[[BoundaryFace], np.ndarray]


def integrate_boundary(region: BoundaryRegion, f: Union[ScalarField, np.ndarray, FaceIntegrand],
                       selection: str = 'all') -> complex:
    """Quadrature of f dS_g over the selected part of the boundary"""
    if isinstance(f, ScalarField):
        require_same_chart(region.chart, f)
        values = f.values
        integrand = lambda face: face.restrict(values)  # noqa: E731
    elif callable(f):
        integrand = f
    else:
        values = np.asarray(f)
        integrand = lambda face: face.restrict(values)  # noqa: E731

    total = 0j
    for face in region.faces:
        mask = face.mask(selection)
        if not mask.any():
            continue
        total += complex(np.sum(face.weights * mask * integrand(face)))
    return total


def boundary_values_max(chart: CylinderChart, values: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(values)[chart.boundary_mask])))
