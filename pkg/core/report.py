"""
core/report.py - Convergence ladders and their verdicts
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ParameterError

log = logging.getLogger(__name__)

TRENDS = ('decreasing', 'bounded', 'bounded_below')


@dataclass(frozen=True)
class ConvergenceReport:
    """
    A ladder of (parameter, norm) pairs judged through normalized ratios.

    The normalized ratio is ``norm / parameter**target_exponent``. Trends:

    - ``decreasing``: ratios strictly decrease along the ladder (an o(.) claim),
      or all ratios are below ``zero_tol`` (nothing to decay).
    - ``bounded``: every ratio stays within ``bound_factor`` times the first rung
      (an O(.) claim).
    - ``bounded_below``: every ratio is at least ``threshold``.
    """
    name: str
    anchor: str
    parameters: Tuple[float, ...]
    norms: Tuple[float, ...]
    target_exponent: float = 0.0
    trend: str = 'decreasing'
    threshold: float = 0.0
    bound_factor: float = 2.0
    zero_tol: float = 1e-12
    parameter_name: str = 'tau'

    def __post_init__(self):
        params = np.asarray(self.parameters, dtype=float)
        norms = np.asarray(self.norms, dtype=float)
        if params.shape != norms.shape or params.size == 0:
            raise ParameterError(f"{self.name}: parameters and norms must be non-empty and of equal length")
        if np.any(np.diff(params) >= 0):
            raise ParameterError(f"{self.name}: parameters must be strictly decreasing, got {self.parameters}")
        if np.any(norms < 0) or not np.all(np.isfinite(norms)):
            raise ParameterError(f"{self.name}: norms must be finite and nonnegative")
        if self.trend not in TRENDS:
            raise ParameterError(f"{self.name}: unknown trend {self.trend!r}")
        object.__setattr__(self, 'parameters', tuple(float(p) for p in params))
        object.__setattr__(self, 'norms', tuple(float(n) for n in norms))

    @property
    def normalized_ratios(self) -> Tuple[float, ...]:
        params = np.asarray(self.parameters)
        return tuple(float(v) for v in np.asarray(self.norms) / params ** self.target_exponent)

    @property
    def fitted_exponent(self) -> float:
        """Least-squares slope of log(norm) against log(parameter); nan when undefined"""
        norms = np.asarray(self.norms)
        if len(norms) < 2 or np.any(norms <= 0):
            return float('nan')
        slope, _ = np.polyfit(np.log(self.parameters), np.log(norms), 1)
        return float(slope)

    @property
    def passed(self) -> bool:
        ratios = np.asarray(self.normalized_ratios)
        if self.trend == 'decreasing':
            if np.all(ratios <= self.zero_tol):
                return True
            return bool(np.all(np.diff(ratios) < 0))
        if self.trend == 'bounded':
            first = ratios[0]
            return bool(np.all(ratios <= self.bound_factor * max(first, self.zero_tol)))
        return bool(np.all(ratios >= self.threshold))

    def rows(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.parameters, self.norms, self.normalized_ratios))

    def header(self) -> Tuple[str, str, str]:
        return (self.parameter_name, 'norm', 'normalized_ratio')

    def verdict(self) -> Dict:
        exponent = self.fitted_exponent
        return {
            'name': self.name,
            'anchor': self.anchor,
            'trend': self.trend,
            'target_exponent': self.target_exponent,
            'fitted_exponent': None if np.isnan(exponent) else exponent,
            'threshold': self.threshold if self.trend == 'bounded_below' else None,
            'passed': self.passed,
        }


@dataclass(frozen=True)
class ReportBundle:
    """Named collection of reports that share one ladder"""
    name: str
    reports: Dict[str, ConvergenceReport] = field(default_factory=dict)

    def __getitem__(self, key: str) -> ConvergenceReport:
        return self.reports[key]

    def __iter__(self) -> Iterator[ConvergenceReport]:
        return iter(self.reports.values())

    def __len__(self) -> int:
        return len(self.reports)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports.values())

    def failures(self) -> List[str]:
        return [key for key, report in self.reports.items() if not report.passed]


def ladder(name: str, anchor: str, parameters: Sequence[float], norms: Sequence[float],
           target_exponent: float = 0.0, trend: str = 'decreasing',
           parameter_name: str = 'tau', threshold: float = 0.0,
           bound_factor: float = 2.0, zero_tol: Optional[float] = None) -> ConvergenceReport:
    """Build a report and log its verdict"""
    kwargs = {} if zero_tol is None else {'zero_tol': zero_tol}
    report = ConvergenceReport(name=name, anchor=anchor, parameters=tuple(parameters), norms=tuple(norms),
                               target_exponent=target_exponent, trend=trend, threshold=threshold,
                               bound_factor=bound_factor, parameter_name=parameter_name, **kwargs)
    log.debug("%s: ratios=%s passed=%s", name, report.normalized_ratios, report.passed)
    return report
