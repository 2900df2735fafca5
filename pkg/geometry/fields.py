"""
geometry/fields.py - Complex grid samples of functions, one-forms and vector fields
"""

from dataclasses import dataclass
from typing import Callable, Iterator, Tuple, Union

import numpy as np

from core.errors import ChartMismatchError, ConfigurationError
from geometry.chart import CylinderChart

Number = Union[int, float, complex, np.number]


def require_same_chart(*objects) -> CylinderChart:
    """Return the shared chart or raise ChartMismatchError"""
    charts = [obj.chart if hasattr(obj, 'chart') else obj for obj in objects]
    first = charts[0]
    for other in charts[1:]:
        if not first.matches(other):
            raise ChartMismatchError(f"chart mismatch: {first.name} {first.grid_sizes} vs {other.name} {other.grid_sizes}")
    return first


def _frozen(values, shape) -> np.ndarray:
    array = np.array(values, dtype=complex)
    if array.shape != tuple(shape):
        raise ConfigurationError(f"field shape {array.shape} does not match chart grid {tuple(shape)}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScalarField:
    chart: CylinderChart
    values: np.ndarray

    # numpy defers binary operators to the reflected methods below
    __array_ufunc__ = None

    def __post_init__(self):
        object.__setattr__(self, 'values', _frozen(self.values, self.chart.shape))

    @classmethod
    def zeros(cls, chart: CylinderChart) -> 'ScalarField':
        return cls(chart, np.zeros(chart.shape))

    @classmethod
    def constant(cls, chart: CylinderChart, value: Number) -> 'ScalarField':
        return cls(chart, np.full(chart.shape, value, dtype=complex))

    @classmethod
    def from_function(cls, chart: CylinderChart, fn: Callable) -> 'ScalarField':
        return cls(chart, chart.sample(fn))

    def _operand(self, other):
        if isinstance(other, ScalarField):
            require_same_chart(self, other)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.chart, self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.chart, self.values - self._operand(other))

    def __rsub__(self, other):
        return ScalarField(self.chart, self._operand(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, (OneForm, VectorField)):
            return other * self
        return ScalarField(self.chart, self.values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ScalarField(self.chart, self.values / self._operand(other))

    def __neg__(self):
        return ScalarField(self.chart, -self.values)

    def conj(self) -> 'ScalarField':
        return ScalarField(self.chart, np.conj(self.values))

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> 'ScalarField':
        return ScalarField(self.chart, fn(self.values))

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))


class _Triple:
    """Three component arrays on a chart; shared by one-forms and vector fields"""

    __array_ufunc__ = None

    def __init__(self, chart: CylinderChart, component_x1, component_r, component_theta):
        self.chart = chart
        self.components = tuple(_frozen(c, chart.shape) for c in (component_x1, component_r, component_theta))

    @classmethod
    def zeros(cls, chart: CylinderChart):
        return cls(chart, *(np.zeros(chart.shape),) * 3)

    @classmethod
    def from_functions(cls, chart: CylinderChart, f1: Callable, fr: Callable, ftheta: Callable):
        return cls(chart, chart.sample(f1), chart.sample(fr), chart.sample(ftheta))

    @property
    def component_x1(self) -> np.ndarray:
        return self.components[0]

    @property
    def component_r(self) -> np.ndarray:
        return self.components[1]

    @property
    def component_theta(self) -> np.ndarray:
        return self.components[2]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.components[k]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.components)

    def _combine(self, other, op):
        if isinstance(other, type(self)):
            require_same_chart(self, other)
            return type(self)(self.chart, *(op(a, b) for a, b in zip(self.components, other.components)))
        if isinstance(other, _Triple):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if isinstance(other, ScalarField):
            require_same_chart(self, other)
            other = other.values
        return type(self)(self.chart, *(op(a, other) for a in self.components))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        if isinstance(other, _Triple):
            raise TypeError("componentwise product of two forms is not defined; use calculus.inner")
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, np.true_divide)

    def __neg__(self):
        return type(self)(self.chart, *(-c for c in self.components))

    def conj(self):
        return type(self)(self.chart, *(np.conj(c) for c in self.components))

    def map(self, fn: Callable[[np.ndarray], np.ndarray]):
        return type(self)(self.chart, *(fn(c) for c in self.components))

    def stack(self) -> np.ndarray:
        return np.stack(self.components)

    @property
    def is_real(self) -> bool:
        return all(np.all(c.imag == 0) for c in self.components)

    def __repr__(self):
        return f"{type(self).__name__}(chart={self.chart.name}, shape={self.chart.shape})"


class OneForm(_Triple):
    """A = A_x1 dx1 + A_r dr + A_theta dtheta"""


class VectorField(_Triple):
    """X = X^1 d/dx1 + X^r d/dr + X^theta d/dtheta (contravariant components)"""


Components = Tuple[np.ndarray, np.ndarray, np.ndarray]
