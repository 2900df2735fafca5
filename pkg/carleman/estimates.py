"""
carleman/estimates.py - Boundary split, semiclassical dual norm and discrete Carleman inequality checks
"""

import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from carleman.weights import PERTURBATION_TERMS, ConjugatedOperator, ConvexifiedWeight
from core.cache import OperatorCache, default_cache
from core.errors import ParameterError, SolverError
from core.report import ConvergenceReport, ladder
from geometry.boundary import BoundaryRegion, integrate_boundary
from geometry.calculus import interior_index, laplace_rows
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart
from geometry.quadrature import hscl_norm, lp_norm, volume_weights

log = logging.getLogger(__name__)

INTERIOR_COLLAR = 0.15
ZERO_BC_TOL = 1e-10

Samples = Union[int, Sequence[ScalarField]]


def boundary_split(chart: CylinderChart, sign: int = 1, collar_width: float = 0.25) -> BoundaryRegion:
    """PLUS = back face of sign*x1, MINUS = front and lateral faces, GAMMA_ONLY = collar of PLUS at its edges"""
    return BoundaryRegion.build(chart, sign, collar_width)


# --- sample families ---

def _unit_coordinates(chart: CylinderChart):
    return [(X - lo) / (hi - lo) for X, (lo, hi) in
            zip(chart.mesh, (chart.x1_range, chart.r_range, chart.theta_range))]


def boundary_samples(chart: CylinderChart, count: int, seed: int = 0, max_mode: int = 3) -> List[ScalarField]:
    """Random combinations of sine products sin(m1 pi s1) sin(m2 pi s2) sin(m3 pi s3), zero on the boundary"""
    rng = np.random.default_rng(seed)
    s = _unit_coordinates(chart)
    samples = []
    for _ in range(count):
        values = np.zeros(chart.shape, dtype=complex)
        for _ in range(int(rng.integers(1, 4))):
            modes = rng.integers(1, max_mode + 1, size=3)
            coefficient = rng.normal() + 1j * rng.normal()
            values += coefficient * np.prod([np.sin(m * np.pi * sj) for m, sj in zip(modes, s)], axis=0)
        values[chart.boundary_mask] = 0.0
        samples.append(ScalarField(chart, values))
    return samples


def interior_samples(chart: CylinderChart, count: int, seed: int = 0,
                     collar: float = INTERIOR_COLLAR) -> List[ScalarField]:
    """Tensor bumps vanishing within ``collar`` (relative) of every face, times trigonometric modes"""
    rng = np.random.default_rng(seed)
    s = _unit_coordinates(chart)
    half = 0.5 - collar
    envelope = np.ones(chart.shape)
    for sj in s:
        t = (sj - 0.5) / half
        inside = np.abs(t) < 1
        factor = np.zeros(chart.shape)
        factor[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
        envelope = envelope * factor
    samples = []
    for _ in range(count):
        modes = rng.integers(0, 4, size=3)
        shifts = rng.uniform(0, np.pi, size=3)
        modulation = np.prod([np.cos(k * np.pi * sj + p) for k, sj, p in zip(modes, s, shifts)], axis=0)
        coefficient = rng.normal() + 1j * rng.normal()
        samples.append(ScalarField(chart, coefficient * (envelope * modulation + 0.25 * envelope)))
    return samples


def _accept(chart: CylinderChart, samples: Sequence[ScalarField], mask: np.ndarray, label: str) -> List[ScalarField]:
    accepted = []
    for index, u in enumerate(samples):
        require_same_chart(chart, u)
        scale = float(np.max(np.abs(u.values)))
        if scale == 0:
            log.warning("%s sample %d is identically zero; rejected", label, index)
            continue
        leak = float(np.max(np.abs(u.values[mask])))
        if leak > ZERO_BC_TOL * scale:
            log.warning("%s sample %d does not vanish where required (%.3g); rejected", label, index, leak / scale)
            continue
        accepted.append(u)
    if not accepted:
        raise ParameterError(f"no admissible {label} samples")
    return accepted


def _collar_mask(chart: CylinderChart, collar: float) -> np.ndarray:
    s = _unit_coordinates(chart)
    mask = np.zeros(chart.shape, dtype=bool)
    for sj in s:
        mask |= (sj < collar - 1e-12) | (sj > 1.0 - collar + 1e-12)
    return mask


# --- norms ---

def hminus1_scl_norm(chart: CylinderChart, v: ScalarField, h: float, cache: Optional[OperatorCache] = None) -> float:
    """
    Discrete dual semiclassical norm: solve (1 - h^2 Lap) w = v with w = 0 on the
    boundary and return sqrt((v, w)) in the volume quadrature.
    """
    require_same_chart(chart, v)
    if not h > 0:
        raise ParameterError(f"h must be positive, got {h}")
    cache = default_cache if cache is None else cache
    interior = chart.interior_mask
    rhs = v.values[interior]
    if not np.any(rhs):
        return 0.0
    key = ('hminus1', chart.key, float(h))
    lu = cache.get_factor(key)
    if lu is None:
        L = laplace_rows(chart, cache)[:, interior_index(chart)]
        M = sp.identity(L.shape[0], format='csc') - h ** 2 * sp.csc_matrix(L)
        try:
            lu = spla.splu(sp.csc_matrix(M, dtype=complex))
        except RuntimeError as exc:
            raise SolverError(f"singular (1 - h^2 Lap) on {chart.name}") from exc
        cache.set_factor(key, lu)
    w = lu.solve(rhs.astype(complex))
    pairing = np.sum(volume_weights(chart)[interior] * np.conj(rhs) * w)
    return float(np.sqrt(max(pairing.real, 0.0)))


def boundary_weight_term(region: BoundaryRegion, weight: ConvexifiedWeight, u: ScalarField) -> float:
    """int_dM (d_nu phi~) |d_nu u|^2 dS_g"""
    chart = region.chart
    dphi = weight.differential(chart)

    def integrand(face):
        return face.normal_component(chart, dphi).real * np.abs(face.normal_derivative(chart, u.values)) ** 2

    return float(integrate_boundary(region, integrand).real)


# --- ratios ---

def boundary_ratio(operator: ConjugatedOperator, region: BoundaryRegion, weight: ConvexifiedWeight,
                   u: ScalarField) -> float:
    """(||P u||^2 + 2 h^3 int (d_nu phi~)|d_nu u|^2) / ((h^2/eps) ||u||^2_{H^1_scl})"""
    chart, h = operator.chart, operator.h
    lhs = lp_norm(chart, operator.apply(u)) ** 2
    boundary = 2.0 * h ** 3 * boundary_weight_term(region, weight, u)
    scale = weight.convexity * h if not weight.is_plain else h ** 2
    return (lhs + boundary) / (scale * hscl_norm(chart, u, h) ** 2)


def interior_ratio(operator: ConjugatedOperator, u: ScalarField) -> float:
    """h ||u||_{H^1_scl} / ||P u||_{H^-1_scl}"""
    chart, h = operator.chart, operator.h
    dual = hminus1_scl_norm(chart, operator.apply(u), h, operator.cache)
    if dual == 0:
        return float('inf')
    return h * hscl_norm(chart, u, h) / dual


def perturbation_terms(operator: ConjugatedOperator, u: ScalarField) -> Dict[str, float]:
    """L2 norms of h^2(<A,A>+q)u, 2ih<A,dphi~>u, ih^2(d*A)u and -2ih^2<A,du>"""
    parts = operator.termwise(u, PERTURBATION_TERMS)
    return {name: lp_norm(operator.chart, field) for name, field in parts.items()}


def carleman_check_boundary(chart: CylinderChart, A: OneForm, q: ScalarField, h_list: Sequence[float],
                            eps: float, samples: Samples = 100, sign: int = 1, seed: int = 0,
                            max_h_over_eps: float = 0.25, threshold: float = 0.01,
                            collar_width: float = 0.25, cache: Optional[OperatorCache] = None) -> ConvergenceReport:
    """Minimum over zero-boundary samples of the boundary Carleman ratio, per h; bounded below by ``threshold``"""
    if isinstance(samples, int):
        samples = boundary_samples(chart, samples, seed)
    samples = _accept(chart, samples, chart.boundary_mask, 'boundary')
    region = boundary_split(chart, sign, collar_width)
    minima = []
    for h in h_list:
        weight = ConvexifiedWeight(sign=sign, h=float(h), eps=eps, max_h_over_eps=max_h_over_eps)
        operator = ConjugatedOperator.for_weight(chart, A, q, weight, cache)
        ratios = np.array([boundary_ratio(operator, region, weight, u) for u in samples])
        minima.append(float(ratios.min()))
        log.info("boundary Carleman h=%.4g eps=%.3g: min ratio %.4g over %d samples", h, eps, minima[-1], len(samples))
    return ladder('carleman_boundary', 'boundary Carleman estimate with convexified weight', h_list, minima,
                  trend='bounded_below', threshold=threshold, parameter_name='h')


def carleman_check_interior(chart: CylinderChart, A: OneForm, q: ScalarField, h_list: Sequence[float],
                            samples: Samples = 100, sign: int = 1, seed: int = 0, bound_factor: float = 2.0,
                            collar: float = INTERIOR_COLLAR, cache: Optional[OperatorCache] = None) -> ConvergenceReport:
    """Maximum over compactly supported samples of h ||u||_{H^1_scl} / ||P u||_{H^-1_scl}, per h; bounded"""
    if isinstance(samples, int):
        samples = interior_samples(chart, samples, seed, collar)
    samples = _accept(chart, samples, _collar_mask(chart, collar), 'interior')
    maxima = []
    for h in h_list:
        operator = ConjugatedOperator.for_weight(chart, A, q, ConvexifiedWeight.plain(sign, float(h)), cache)
        ratios = np.array([interior_ratio(operator, u) for u in samples])
        maxima.append(float(ratios.max()))
        log.info("interior Carleman h=%.4g: max ratio %.4g over %d samples", h, maxima[-1], len(samples))
    return ladder('carleman_interior', 'interior Carleman estimate in the dual semiclassical norm', h_list, maxima,
                  trend='bounded', bound_factor=bound_factor, parameter_name='h')
