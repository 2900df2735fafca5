# ===========================================
# checks/euclid_map.py
# ===========================================

from typing import Generator

import numpy as np

from core.check import BaseCheck, Event
from geometry.transforms import log_polar_map
from utils.io import write_csv
from utils.presets import build_chart

# analytic sample points in the upper half space, off the polar axis
SAMPLE_POINTS = np.array([
    [0.3, 0.2, 1.0],
    [1.0, -0.5, 0.8],
    [-0.7, 0.4, 1.5],
    [0.1, 0.6, 0.3],
    [2.0, 1.0, 0.5],
])
WARP_TOL = 1e-12


class EuclidMapCheck(BaseCheck):
    """Log-polar coordinates turn the Euclidean Laplacian into a warped cylinder Laplacian"""

    name = 'euclid-map'
    section = 'euclid'

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        yield self.progress(f"Symbolic check with u = {s['test_function']}", 10)
        samples = log_polar_map(SAMPLE_POINTS, s['test_function'], verify=True)
        write_csv(self.out_dir / 'samples.csv', ('x1', 'x2', 'x3', 'y1', 'vartheta', 'varphi', 'warp'),
                  (tuple(p) + tuple(c) + (w,) for p, c, w in
                   zip(SAMPLE_POINTS, samples.coordinates, samples.warp)))
        yield self.verdict('laplacian', 'Euclidean Laplacian equals the warped Laplace-Beltrami operator',
                           samples.laplacian_error <= s['tol'], error=samples.laplacian_error, tol=s['tol'])
        yield self.verdict('metric', 'pulled-back Euclidean metric is exp(2 y1)(dy1^2 + g_S2)',
                           samples.metric_error <= s['tol'], error=samples.metric_error, tol=s['tol'])

        yield self.progress("Conformal factor at the probes", 70)
        radius_squared = np.sum(SAMPLE_POINTS ** 2, axis=1)
        sample_gap = float(np.max(np.abs(samples.warp - radius_squared) / radius_squared))
        chart = build_chart('log-polar-image', self.config.grid('experiment'), self.config.grid_scale)
        chart_gap = float(np.max(np.abs(chart.warp - np.exp(2.0 * chart.mesh[0]))))
        yield self.verdict('conformal_factor', 'conformal factor c = exp(2 y1) on the log-polar chart',
                           max(sample_gap, chart_gap) <= WARP_TOL, sample_gap=sample_gap, chart_gap=chart_gap,
                           tol=WARP_TOL)
        self.finish(test_function=s['test_function'], points=len(SAMPLE_POINTS))
