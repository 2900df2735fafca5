# ===========================================
# checks/cgo_build.py
# ===========================================

from typing import Generator

from cgo.amplitude import ThetaProfile, eikonal_residual, regularization_scale
from cgo.solution import build_cgo, cgo_ladder, manufactured_remainder
from core.check import BaseCheck, Event
from dbar.phase import phase_ladder
from utils.io import write_csv
from utils.presets import CHARTS, build_chart, electric, potential

EIKONAL_TOL = 1e-12


class CGOBuildCheck(BaseCheck):
    """CGO norm ledger over the h ladder, phase estimates and the manufactured remainder solve"""

    name = 'cgo-build'
    section = 'cgo'

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        chart = self.chart('experiment')
        A = potential(chart, s['potential'])
        q = electric(chart, s['electric'])
        b = ThetaProfile(kind='bump', center=s['b_center'], half_width=s['b_half_width'], arc=chart.theta_range)

        residuals = {name: eikonal_residual(build_chart(name, self.config.grid('experiment'), self.config.grid_scale))
                     for name in CHARTS}
        yield self.verdict('eikonal', 'complex phase solves the eikonal equation exactly',
                           max(residuals.values()) <= EIKONAL_TOL, residuals=residuals, tol=EIKONAL_TOL)

        solutions = []
        h_list = s['h_list']
        for i, h in enumerate(h_list):
            if not self._running:
                return
            yield self.progress(f"Building CGO at h = {h:g}", 5 + int(70 * i / len(h_list)))
            solutions.append(build_cgo(chart, A, q, h, 1, s['lam'], b, kappa=s['kappa'], width=s['width'],
                                       cache=self.cache))

        keys = sorted(solutions[0].norm_ledger)
        write_csv(self.out_dir / 'ledger.csv', ('h', 'tau') + tuple(keys),
                  ((u.h, u.tau) + tuple(u.norm_ledger[k] for k in keys) for u in solutions))

        yield self.progress("Phase estimates", 80)
        taus = [regularization_scale(h, s['kappa']) for h in h_list]
        bundles = [cgo_ladder(solutions), phase_ladder(A, taus, 1, width=s['width'], cache=self.cache)]
        self.write_ladders(bundles)
        yield from self.bundle_events(bundles)

        yield self.progress("Manufactured remainder", 90)
        error, _ = manufactured_remainder(chart, A, q, s['manufactured_h'], 1, cache=self.cache)
        yield self.verdict('manufactured_remainder', 'remainder solve against a manufactured solution',
                           error <= s['manufactured_tol'], relative_error=error, tol=s['manufactured_tol'])
        self.finish(chart=chart.name, grid=list(chart.shape), potential=s['potential'], electric=s['electric'])
