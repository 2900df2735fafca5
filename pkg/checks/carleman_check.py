# ===========================================
# checks/carleman_check.py
# ===========================================

from typing import Generator, List, Tuple

from carleman.estimates import (
    boundary_samples,
    carleman_check_boundary,
    carleman_check_interior,
    perturbation_terms,
)
from carleman.weights import ConjugatedOperator, ConvexifiedWeight
from core.check import BaseCheck, Event
from core.report import ReportBundle
from utils.io import write_csv
from utils.presets import electric, potential


class CarlemanCheck(BaseCheck):
    """Boundary and interior Carleman ratios for the zero and the configured coefficients"""

    name = 'carleman-check'
    section = 'carleman'

    def _presets(self) -> List[Tuple[str, str]]:
        s = self.settings
        presets = [('zero', 'zero')] if s['include_zero'] else []
        if (s['potential'], s['electric']) not in presets:
            presets.append((s['potential'], s['electric']))
        return presets

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        chart = self.chart('experiment')
        coefficients = [(f"{a}+{q}", potential(chart, a), electric(chart, q)) for a, q in self._presets()]
        samples = boundary_samples(chart, s['samples'], self.config.seed)

        bundles, terms = [], []
        for i, (label, A, q) in enumerate(coefficients):
            if not self._running:
                return
            yield self.progress(f"Boundary estimate for {label}", 5 + int(90 * i / len(coefficients)))
            boundary = carleman_check_boundary(chart, A, q, s['h_list'], s['eps'], samples, sign=1,
                                               seed=self.config.seed, max_h_over_eps=s['max_h_over_eps'],
                                               threshold=s['threshold'], collar_width=s['collar_width'],
                                               cache=self.cache)
            yield self.progress(f"Interior estimate for {label}", 5 + int(90 * (i + 0.5) / len(coefficients)))
            interior = carleman_check_interior(chart, A, q, s['interior_h_list'], s['samples'], sign=1,
                                               seed=self.config.seed, bound_factor=s['bound_factor'],
                                               cache=self.cache)
            bundles.append(ReportBundle(name=f'carleman[{label}]',
                                        reports={'boundary': boundary, 'interior': interior}))

            h = s['h_list'][-1]
            weight = ConvexifiedWeight(sign=1, h=h, eps=s['eps'], max_h_over_eps=s['max_h_over_eps'])
            operator = ConjugatedOperator.for_weight(chart, A, q, weight, self.cache)
            for term, value in perturbation_terms(operator, samples[0]).items():
                terms.append((label, h, term, value))

        self.write_ladders(bundles)
        write_csv(self.out_dir / 'perturbations.csv', ('coefficients', 'h', 'term', 'l2'), terms)
        yield from self.bundle_events(bundles)
        self.finish(chart=chart.name, grid=list(chart.shape), eps=s['eps'], samples=s['samples'])
