# ===========================================
# recover/__init__.py
# ===========================================
"""Electric data operator, injectivity report and regularized recovery"""

from .operator import (
    DataOperator,
    Probe,
    assemble_data_operator,
    certify_closed,
    injectivity_report,
    l_curve,
    recover_q,
)

__all__ = ['DataOperator', 'Probe', 'assemble_data_operator', 'injectivity_report', 'recover_q', 'l_curve',
           'certify_closed']
