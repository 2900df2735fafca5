# ===========================================
# core/__init__.py
# ===========================================
"""Core modules for the inverse-problem laboratory"""

from .cache import OperatorCache, default_cache
from .report import ConvergenceReport, ReportBundle

__all__ = ['OperatorCache', 'default_cache', 'ConvergenceReport', 'ReportBundle']
