# ===========================================
# checks/recover_q.py
# ===========================================

from typing import Generator, Optional

from core.check import BaseCheck, Event
from core.errors import ConfigurationError
from geometry.fields import ScalarField
from recover.operator import (
    METHODS,
    add_noise,
    assemble_data_operator,
    injectivity_report,
    l_curve,
    l_curve_monotone,
    lambda_ladder,
    recover_q,
)
from utils.io import write_csv, write_data_operator, write_field
from utils.presets import electric

L_CURVE_COLUMNS = ('reg', 'residual_norm', 'solution_norm', 'relative_error')


class RecoverCheck(BaseCheck):
    """Assemble the electric data operator, report injectivity and invert synthetic data"""

    name = 'recover-q'
    section = 'recover'
    estimate: Optional[ScalarField] = None

    def run(self, truth: Optional[ScalarField] = None) -> Generator[Event, None, None]:
        s = self.settings
        if s['method'] not in METHODS:
            raise ConfigurationError(f"unknown regularization method {s['method']!r}; expected one of {METHODS}")
        chart = self.chart() if truth is None else truth.chart
        truth = electric(chart, s['electric']) if truth is None else truth

        yield self.progress(f"Assembling the data operator on {chart.shape}", 5)
        lambdas = lambda_ladder(s['lambda_min'], s['lambda_max'], s['lambda_count'])
        op = assemble_data_operator(chart, lambdas, bump_count=s['bump_count'])
        if s['write_operator']:
            write_data_operator(self.out_dir / 'operator', op)

        yield self.progress("Singular values", 30)
        report = injectivity_report(op)
        write_csv(self.out_dir / 'singular_values.csv', ('index', 'sigma'), enumerate(report.singular_values))
        yield self.verdict('injectivity', 'electric data map is injective on the grid',
                           report.sigma_min > 0 and report.injective, sigma_min=report.sigma_min,
                           sigma_max=report.sigma_max, condition=report.condition, rank=report.rank,
                           unknowns=report.unknowns, probes=op.shape[0])
        if not self._running:
            return

        yield self.progress(f"Inverting clean data ({s['method']}, reg {s['reg']:g})", 55)
        data = op.apply(truth)
        estimate, diagnostics = recover_q(op, data, s['reg'], s['method'], truth)
        self.estimate = estimate
        write_field(self.out_dir / 'estimate.csv', estimate)
        yield self.verdict('recovery', 'electric potential difference recovered from its data',
                           diagnostics['relative_error'] <= s['error_tol'], tol=s['error_tol'], **diagnostics)

        yield self.progress(f"L-curve on {s['noise']:.0%} noisy data", 75)
        noisy = add_noise(data, s['noise'], self.config.seed)
        rows = l_curve(op, noisy, s['reg_list'], s['method'], truth)
        write_csv(self.out_dir / 'l_curve.csv', L_CURVE_COLUMNS, ([row[k] for k in L_CURVE_COLUMNS] for row in rows))
        yield self.verdict('l_curve', 'regularized residual and solution norms are monotone in reg',
                           l_curve_monotone(rows), noise=s['noise'], points=len(rows))
        self.finish(chart=chart.name, grid=list(chart.shape), lambdas=list(lambdas), method=s['method'])
