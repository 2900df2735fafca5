# ===========================================
# mollify/__init__.py
# ===========================================
"""Mollifier regularization and rate ladders"""

from .kernel import DEFAULT_KERNEL, MollifierKernel, mollify, regularize_one_form
from .rates import CORPUS, rate_study_Lp, regularization_rates

__all__ = ['MollifierKernel', 'DEFAULT_KERNEL', 'mollify', 'regularize_one_form',
           'rate_study_Lp', 'regularization_rates', 'CORPUS']
