"""
core/errors.py - Exception hierarchy shared by every package
"""

from typing import Optional


class LabError(Exception):
    """Base class for errors raised by the laboratory"""


class ConfigurationError(LabError, ValueError):
    """Invalid configuration, grid or ladder"""


class ChartMismatchError(ConfigurationError):
    """Fields or forms living on different charts were combined"""


class DomainError(LabError, ValueError):
    """Input outside the domain of an operation"""

    def __init__(self, message: str, measured: Optional[float] = None):
        super().__init__(message)
        self.measured = measured


class ParameterError(LabError, ValueError):
    """Invalid numerical parameter (tau, h, eps, reg, ...)"""


class SupportError(ParameterError):
    """Profile does not vanish where it must"""


class WindowError(LabError):
    """Right-hand side touches the edge of the convolution window"""


class SolverError(LabError):
    """A discrete solve failed"""

    def __init__(self, message: str, condition: Optional[float] = None):
        super().__init__(message)
        self.condition = condition


class NumericError(LabError, ArithmeticError):
    """Overflow or non-finite intermediate"""


class GaugeError(LabError):
    """Gauge potential does not vanish on the boundary"""


class PairingError(LabError):
    """CGO solutions with equal exponential signs were paired"""


class UnsupportedScenarioError(LabError, NotImplementedError):
    """Operation needs a gauge scenario"""
