# ===========================================
# checks/identity_check.py
# ===========================================

from typing import Generator, List, Tuple

import numpy as np

from cgo.amplitude import ThetaProfile
from cgo.solution import build_cgo
from core.check import BaseCheck, Event
from core.report import ReportBundle, ladder
from dbar.phase import DEFAULT_WIDTH, pair_phase
from geometry.boundary import BoundaryRegion
from geometry.chart import CylinderChart
from geometry.fields import ScalarField
from identity.functionals import (
    boundary_rhs,
    boundary_terms,
    identity_scale,
    integral_identity_lhs,
    magnetic_functional_scale,
    magnetic_limit_functional,
)
from identity.gauge import DEFAULT_CLOSED_TOL, gauge_matched_solution
from identity.green import green_residual
from identity.scenarios import ScenarioPair
from recover.operator import magnetic_probes
from utils.io import write_csv
from utils.presets import electric, potential, scenario

CANCELLATION_TOL = 1e-8

IDENTITY_COLUMNS = ('scenario', 'h', 'lhs_re', 'lhs_im', 'rhs_re', 'rhs_im', 'scale', 'relative_gap',
                    'J_abs', 'K_abs')


def green_fields(chart: CylinderChart) -> Tuple[ScalarField, ScalarField]:
    """Smooth complex pair for the Green formula, nonzero on every face"""
    X1, R, TH = chart.mesh
    u = ScalarField(chart, np.exp(X1) * np.cos(R) * (1.0 + TH) + 0.5j * X1 * R)
    v = ScalarField(chart, np.sin(X1 + R) * np.exp(1j * TH))
    return u, v


class IdentityCheck(BaseCheck):
    """Green formula order, the gauge integral identity with its boundary terms, and the limit functionals"""

    name = 'identity'
    section = 'identity'

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        chart = self.chart('experiment')
        pairs = [scenario(chart, name) for name in list(s['scenarios']) + [s['generic']]]

        yield self.progress("Green formula under refinement", 2)
        yield self._green(chart)

        rows, bundles = [], []
        for i, pair in enumerate(pairs):
            if not self._running:
                return
            yield self.progress(f"Integral identity for {pair.name}", 10 + int(70 * i / len(pairs)))
            pair_rows, bundle, cancellation = self._identity_ladder(chart, pair)
            rows.extend(pair_rows)
            if bundle is not None:
                bundles.append(bundle)
                gaps = [row[7] for row in pair_rows]
                yield self.verdict(f'identity[{pair.name}]', 'integral identity equals its boundary terms',
                                   max(gaps) <= s['identity_tol'], relative_gaps=gaps, tol=s['identity_tol'])
            yield self.verdict(f'cancellation[{pair.name}]', 'CGO exponentials cancel in the identity',
                               cancellation <= CANCELLATION_TOL, relative_difference=cancellation,
                               tol=CANCELLATION_TOL)
        write_csv(self.out_dir / 'identity.csv', IDENTITY_COLUMNS, rows)
        self.write_ladders(bundles)
        yield from self.bundle_events(bundles)

        yield self.progress("Magnetic limit functionals", 85)
        functional_rows = []
        for pair in pairs:
            values = self._functionals(chart, pair)
            functional_rows.extend(values)
            relative = max(row[5] for row in values)
            if pair.is_gauge:
                yield self.verdict(f'magnetic_functional[{pair.name}]',
                                   'magnetic limit functional vanishes for gauge-equivalent potentials',
                                   relative <= s['functional_tol'], max_relative=relative,
                                   probes=len(values), tol=s['functional_tol'])
            else:
                curl = pair.curl_norm()
                yield self.verdict(f'not_closed[{pair.name}]', 'generic potential difference is not closed',
                                   curl > DEFAULT_CLOSED_TOL, curl_norm=curl, max_relative=relative)
        write_csv(self.out_dir / 'functionals.csv',
                  ('scenario', 'lambda', 'profile', 'abs_value', 'scale', 'relative'), functional_rows)
        self.finish(chart=chart.name, grid=list(chart.shape), scenarios=[p.name for p in pairs])

    def _green(self, chart: CylinderChart) -> Event:
        s = self.settings
        spacings, residuals = [], []
        for n in s['green_sizes']:
            refined = chart.refined((n, n, (n - 1) // 2 + 1))
            u, v = green_fields(refined)
            residual = green_residual(refined, potential(refined, 'smooth'), electric(refined, 'smooth-bump'), u, v)
            spacings.append(max(refined.spacings))
            residuals.append(residual)
        write_csv(self.out_dir / 'green.csv', ('spacing', 'residual'), zip(spacings, residuals))
        order = float(np.polyfit(np.log(spacings), np.log(residuals), 1)[0]) if min(residuals) > 0 else float('inf')
        return self.verdict('green_order', 'magnetic Green formula residual under refinement',
                            order >= s['green_order'], order=order, min_order=s['green_order'],
                            residuals=residuals)

    def _identity_ladder(self, chart: CylinderChart, pair: ScenarioPair):
        s = self.settings
        b = ThetaProfile(kind='bump', center=0.0, half_width=0.4, arc=chart.theta_range)
        region = BoundaryRegion.build(chart, 1, s['collar_width'])
        rows, hJ, hK = [], [], []
        cancellation = 0.0
        for j, h in enumerate(s['h_list']):
            u1 = build_cgo(chart, pair.A1, pair.q1, h, 1, s['lam'], b, cache=self.cache)
            u2 = build_cgo(chart, pair.A2, pair.q2, h, -1, 0.0, b, cache=self.cache)
            lhs = integral_identity_lhs(pair, u1, u2)
            scale = identity_scale(pair, u1, u2)
            if j == 0:
                explicit = integral_identity_lhs(pair, u1, u2, explicit=True)
                cancellation = abs(explicit - lhs) / max(scale, 1e-300)
            if not pair.is_gauge:
                rows.append((pair.name, h, lhs.real, lhs.imag, np.nan, np.nan, scale, np.nan, np.nan, np.nan))
                continue
            w2 = gauge_matched_solution(u1, pair.phi)
            rhs = boundary_rhs(pair, u1, u2, w2, region, h, selection='all')
            J, K = boundary_terms(pair, u1, u2, w2, region, h)
            gap = abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs)
            rows.append((pair.name, h, lhs.real, lhs.imag, rhs.real, rhs.imag, scale, gap, abs(J), abs(K)))
            hJ.append(h * abs(J))
            hK.append(h * abs(K))
        if not pair.is_gauge:
            return rows, None, cancellation
        reports = {
            'hJ': ladder('hJ', 'boundary term J off Gamma is o(1/h)', s['h_list'], hJ, parameter_name='h'),
            'hK': ladder('hK', 'boundary term K off Gamma is o(1/h)', s['h_list'], hK, parameter_name='h'),
        }
        return rows, ReportBundle(name=f'boundary_terms[{pair.name}]', reports=reports), cancellation

    def _functionals(self, chart: CylinderChart, pair: ScenarioPair) -> List[tuple]:
        s = self.settings
        Phi = pair_phase(pair.A1, pair.A2, DEFAULT_WIDTH, cache=self.cache)
        rows = []
        for probe in magnetic_probes(chart, s['lambda_list'], s['bump_count']):
            value = abs(magnetic_limit_functional(pair.delta, Phi, probe.lam, probe.profile))
            scale = magnetic_functional_scale(pair.delta, probe.lam, probe.profile)
            rows.append((pair.name, probe.lam, probe.profile.label(), value, scale,
                         value / scale if scale > 0 else 0.0))
        return rows
