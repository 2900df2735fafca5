# ===========================================
# checks/dbar_check.py
# ===========================================

from typing import Generator

from cgo.amplitude import ThetaProfile
from cgo.solution import transport_refinement
from core.check import BaseCheck, Event
from dbar.cauchy import refinement_study
from utils.io import write_csv
from utils.presets import potential


class DbarCheck(BaseCheck):
    """Cauchy transform refinement against the bump oracle, and the transport residual order"""

    name = 'dbar-check'
    section = 'dbar'

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        sizes = [int(round((n - 1) * self.config.grid_scale)) + 1 for n in s['sizes']]
        chart = self.chart('experiment')
        name = s['transport_potential']
        potential(chart, name)  # unknown presets fail before anything is written

        yield self.progress(f"Cauchy transform on {sizes} grids", 5)
        study = refinement_study(sizes, s['half_width'], s['radius'], cache=self.cache)
        write_csv(self.out_dir / 'refinement.csv', ('spacing', 'sup_error', 'residual_l2'),
                  zip(study.spacings, study.sup_errors, study.residuals))
        ratios = study.error_ratios
        yield self.verdict('dbar_sup_error', 'Cauchy transform first-order convergence under grid halving',
                           min(ratios) >= s['min_ratio'], error_ratios=list(ratios),
                           residual_ratios=list(study.residual_ratios), min_ratio=s['min_ratio'],
                           max_ratio=s['max_ratio'], within_max_ratio=bool(max(ratios) <= s['max_ratio']))
        if not self._running:
            return

        yield self.progress("Transport residual under refinement", 50)
        b = ThetaProfile(kind='bump', center=0.0, half_width=0.4, arc=chart.theta_range)
        grids = [(n, n, s['transport_theta_nodes']) for n in s['transport_sizes']]
        spacings, residuals, order = transport_refinement(chart, lambda c: potential(c, name), s['transport_h'],
                                                          1, 1.0, b, grids)
        write_csv(self.out_dir / 'transport.csv', ('spacing', 'residual_l2'), zip(spacings, residuals))
        yield self.verdict('transport_order', 'amplitude transport residual order under refinement',
                           bool(order >= s['min_transport_order']),
                           order=order, min_order=s['min_transport_order'])
        self.finish(sizes=sizes)
