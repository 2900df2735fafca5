"""
geometry/chart.py - Discretized warped-product cylinder in coordinates (x1, r, theta)

The metric is g = c (dx1^2 + dr^2 + J^2 dtheta^2) with J = |g0|^(1/2) the
transversal density. For the Euclidean disk in polar normal coordinates J = r.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from core.errors import ConfigurationError, DomainError

log = logging.getLogger(__name__)

WarpFunction = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]

MIN_NODES = 3


@dataclass(frozen=True, eq=False)
class CylinderChart:
    x1_range: Tuple[float, float]
    r_range: Tuple[float, float]
    theta_range: Tuple[float, float]
    grid_sizes: Tuple[int, int, int]
    warp: np.ndarray
    transversal_density: np.ndarray
    dimension: int = 3
    name: str = 'custom'
    warp_fn: Optional[WarpFunction] = field(default=None, repr=False)

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.grid_sizes)
        if len(sizes) != 3 or any(n < MIN_NODES for n in sizes):
            raise ConfigurationError(f"grid too coarse: every dimension needs >= {MIN_NODES} nodes, got {sizes}")
        if self.dimension != 3:
            raise ConfigurationError(f"only n = 3 charts are supported, got n = {self.dimension}")
        for label, (lo, hi) in (('x1', self.x1_range), ('r', self.r_range), ('theta', self.theta_range)):
            if not hi > lo:
                raise ConfigurationError(f"{label}_range must be increasing, got ({lo}, {hi})")
        if self.r_range[0] <= 0:
            raise DomainError(f"r_min must be positive (centre outside M), got {self.r_range[0]}", self.r_range[0])

        warp = np.array(self.warp, dtype=float)
        density = np.array(self.transversal_density, dtype=float)
        if warp.shape != sizes or density.shape != sizes:
            raise ConfigurationError(f"warp/density samples must have shape {sizes}")
        if not np.all(warp > 0):
            raise DomainError("warp c must be strictly positive at every node", float(warp.min()))
        if not np.all(density > 0):
            raise DomainError("transversal density must be strictly positive", float(density.min()))
        warp.setflags(write=False)
        density.setflags(write=False)

        object.__setattr__(self, 'grid_sizes', sizes)
        object.__setattr__(self, 'x1_range', tuple(float(v) for v in self.x1_range))
        object.__setattr__(self, 'r_range', tuple(float(v) for v in self.r_range))
        object.__setattr__(self, 'theta_range', tuple(float(v) for v in self.theta_range))
        object.__setattr__(self, 'warp', warp)
        object.__setattr__(self, 'transversal_density', density)

    @classmethod
    def build(cls, x1_range: Tuple[float, float], r_range: Tuple[float, float],
              theta_range: Tuple[float, float], grid_sizes: Tuple[int, int, int],
              warp_fn: Optional[WarpFunction] = None, name: str = 'custom') -> 'CylinderChart':
        """Sample a closed-form warp on the grid; the transversal disk is Euclidean (J = r)"""
        sizes = tuple(int(n) for n in grid_sizes)
        if len(sizes) != 3 or any(n < MIN_NODES for n in sizes):
            raise ConfigurationError(f"grid too coarse: every dimension needs >= {MIN_NODES} nodes, got {sizes}")
        axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip((x1_range, r_range, theta_range), sizes)]
        X1, R, TH = np.meshgrid(*axes, indexing='ij')
        warp = np.ones(sizes) if warp_fn is None else np.broadcast_to(warp_fn(X1, R, TH), sizes).astype(float)
        log.debug("chart %s: sizes=%s x1=%s r=%s theta=%s", name, sizes, x1_range, r_range, theta_range)
        return cls(x1_range=tuple(x1_range), r_range=tuple(r_range), theta_range=tuple(theta_range),
                   grid_sizes=sizes, warp=warp, transversal_density=R.copy(), name=name,
                   warp_fn=warp_fn if warp_fn is not None else _unit_warp)

    def refined(self, grid_sizes: Tuple[int, int, int]) -> 'CylinderChart':
        """Same geometry on another grid"""
        if self.warp_fn is None:
            raise ConfigurationError(f"chart {self.name} has no closed-form warp to resample")
        return CylinderChart.build(self.x1_range, self.r_range, self.theta_range, grid_sizes,
                                   warp_fn=self.warp_fn, name=self.name)

    # --- grid ---

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.grid_sizes

    @cached_property
    def axes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.linspace(lo, hi, n) for (lo, hi), n in
                     zip((self.x1_range, self.r_range, self.theta_range), self.grid_sizes))

    @property
    def node_count(self) -> int:
        return int(np.prod(self.grid_sizes))

    @cached_property
    def spacings(self) -> Tuple[float, float, float]:
        return tuple(float(axis[1] - axis[0]) for axis in self.axes)

    @cached_property
    def mesh(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.axes, indexing='ij'))

    @cached_property
    def extents(self) -> Tuple[float, float, float]:
        return tuple(hi - lo for lo, hi in (self.x1_range, self.r_range, self.theta_range))

    @cached_property
    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[1:-1, 1:-1, 1:-1] = True
        return mask

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask

    # --- metric data ---

    @cached_property
    def metric_diagonal(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(g_11, g_rr, g_thth)"""
        c, J = self.warp, self.transversal_density
        return c, c, c * J ** 2

    @cached_property
    def inverse_metric_diagonal(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(g^11, g^rr, g^thth)"""
        return tuple(1.0 / g for g in self.metric_diagonal)

    @cached_property
    def metric_determinant(self) -> np.ndarray:
        """|g| = c^n |g0|"""
        return self.warp ** self.dimension * self.transversal_density ** 2

    @cached_property
    def sqrt_det(self) -> np.ndarray:
        return np.sqrt(self.metric_determinant)

    @cached_property
    def key(self) -> Tuple:
        """Hashable identity of the discrete geometry"""
        digest = hashlib.sha1(np.ascontiguousarray(self.warp).tobytes())
        digest.update(np.ascontiguousarray(self.transversal_density).tobytes())
        return (self.x1_range, self.r_range, self.theta_range, self.grid_sizes, digest.hexdigest())

    def matches(self, other: 'CylinderChart') -> bool:
        return self is other or self.key == other.key

    def sample(self, fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
        """Evaluate a closed-form function of (x1, r, theta) on the grid"""
        return np.broadcast_to(fn(*self.mesh), self.shape)


def _unit_warp(x1, r, theta):
    return np.ones(np.broadcast(x1, r, theta).shape)
