# ===========================================
# checks/mollify_rates.py
# ===========================================

from typing import Generator

from core.check import BaseCheck, Event
from core.errors import ConfigurationError
from geometry.fields import ScalarField
from mollify.rates import CORPUS, REGIONS, rate_study_Lp, regularization_rates
from utils.presets import potential


class MollifyRatesCheck(BaseCheck):
    """Mollifier ladders for a corpus function and the regularized potential"""

    name = 'mollify-rates'
    section = 'mollify'

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        if s['corpus'] not in CORPUS:
            raise ConfigurationError(f"unknown corpus {s['corpus']!r}; expected one of {sorted(CORPUS)}")
        if s['region'] not in REGIONS:
            raise ConfigurationError(f"unknown region {s['region']!r}; expected one of {REGIONS}")
        chart = self.chart()
        f = ScalarField.from_function(chart, CORPUS[s['corpus']])
        A = potential(chart, s['potential'])

        yield self.progress(f"Mollifying the {s['corpus']} corpus on {chart.shape}", 10)
        scalar = rate_study_Lp(f, s['p'], s['tau_list'], region=s['region'], bound_factor=s['bound_factor'])
        if not self._running:
            return
        yield self.progress(f"Regularizing the {s['potential']} potential", 55)
        one_form = regularization_rates(A, s['tau_list'], region=s['region'], bound_factor=s['bound_factor'])

        bundles = [scalar, one_form]
        self.write_ladders(bundles)
        yield from self.bundle_events(bundles)
        self.finish(chart=chart.name, grid=list(chart.shape), corpus=s['corpus'], potential=s['potential'])
