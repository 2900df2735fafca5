"""
recover/operator.py - Discrete electric data map, its injectivity report and regularized inversion

Rows are probes (lambda, b, centre); columns are the chart nodes carrying the
unknown q1 - q2. The inversion works on the row-normalized system, where every
probe has unit norm, and reuses one SVD for Tikhonov, truncated SVD and the
L-curve sweep.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from cgo.amplitude import ThetaProfile
from core.errors import ParameterError, SolverError
from dbar.phase import DEFAULT_WIDTH, phase_correction
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField
from identity.functionals import (
    electric_probe,
    magnetic_functional_scale,
    magnetic_limit_functional,
    polar_about,
)
from identity.scenarios import exterior_norm

log = logging.getLogger(__name__)

# transversal polar centres; all lie off the default charts' (r, theta) sectors
DEFAULT_CENTERS = (0j, 0.8j, -0.8j, -0.6 + 0j, 2.0 + 1.6j, 2.0 - 1.6j, 3.6 + 0j, 1.0 + 1.2j)
DEFAULT_BUMPS = 6
SVD_RTOL = 1e-10
METHODS = ('tikhonov', 'tsvd')


@dataclass(frozen=True)
class Probe:
    lam: float
    profile: ThetaProfile
    center: complex = 0j

    def label(self) -> str:
        return f"lambda={self.lam:.4g} b={self.profile.label()} omega={self.center:.3g}"


def lambda_ladder(lambda_min: float, lambda_max: float, count: int) -> Tuple[float, ...]:
    if count < 1:
        raise ParameterError(f"lambda count must be positive, got {count}")
    return tuple(float(x) for x in np.linspace(lambda_min, lambda_max, count))


def angular_window(chart: CylinderChart, center: complex) -> Tuple[float, float]:
    """Range of theta_omega over the chart nodes"""
    if center == 0:
        return chart.theta_range
    _, theta = polar_about(chart, center)
    return float(np.min(theta)), float(np.max(theta))


def bump_family(window: Tuple[float, float], count: int = DEFAULT_BUMPS) -> Tuple[ThetaProfile, ...]:
    """``count`` bumps centred on equal cells of the window, each reaching its neighbours' centres"""
    lo, hi = window
    cell = (hi - lo) / count
    return tuple(ThetaProfile(kind='bump', center=lo + (k + 0.5) * cell, half_width=cell, arc=window)
                 for k in range(count))


def default_probes(chart: CylinderChart, lambdas: Sequence[float], centers: Sequence[complex] = DEFAULT_CENTERS,
                   bump_count: int = DEFAULT_BUMPS) -> List[Probe]:
    probes = []
    for center in centers:
        for profile in bump_family(angular_window(chart, center), bump_count):
            probes.extend(Probe(lam=float(lam), profile=profile, center=complex(center)) for lam in lambdas)
    return probes


@dataclass(eq=False)
class DataOperator:
    chart: CylinderChart
    probes: Tuple[Probe, ...]
    matrix: np.ndarray
    _svd: Dict[bool, Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    @property
    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=1)

    def apply(self, dq: ScalarField) -> np.ndarray:
        """Electric data of every probe"""
        return self.matrix @ dq.values.ravel()

    def system(self, real: bool = True) -> np.ndarray:
        """Row-normalized matrix; with ``real`` the unknown is real and Re/Im rows are stacked"""
        normalized = self.matrix / self.row_norms[:, None]
        if real:
            return np.vstack([normalized.real, normalized.imag])
        return normalized

    def rhs(self, data: np.ndarray, real: bool = True) -> np.ndarray:
        scaled = np.asarray(data) / self.row_norms
        if real:
            return np.concatenate([scaled.real, scaled.imag])
        return scaled

    def svd(self, real: bool = True) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if real not in self._svd:
            try:
                self._svd[real] = linalg.svd(self.system(real), full_matrices=False)
            except (linalg.LinAlgError, ValueError) as e:
                raise SolverError(f"SVD of the data operator failed: {e}") from e
        return self._svd[real]


def assemble_data_operator(chart: CylinderChart, lambdas: Sequence[float],
                           b_family: Optional[Sequence[ThetaProfile]] = None,
                           centers: Sequence[complex] = DEFAULT_CENTERS,
                           bump_count: int = DEFAULT_BUMPS) -> DataOperator:
    """
    One row per probe. An explicit ``b_family`` is used about the polar origin
    only; otherwise each centre gets ``bump_count`` bumps over its angular window.
    """
    if b_family is not None:
        probes = [Probe(lam=float(lam), profile=b) for b in b_family for lam in lambdas]
    else:
        probes = default_probes(chart, lambdas, centers, bump_count)
    if not probes:
        raise ParameterError("empty probe family")
    if len(lambdas) < 8:
        log.warning("only %d lambda values; the data operator may not separate (x1, r)", len(lambdas))

    matrix = np.empty((len(probes), chart.node_count), dtype=complex)
    for i, probe in enumerate(probes):
        matrix[i] = electric_probe(chart, probe.lam, probe.profile, probe.center).ravel()
    if not np.all(np.isfinite(matrix)):
        raise ParameterError("data operator has non-finite entries; reduce the lambda range")
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0):
        raise ParameterError(f"{int(np.sum(norms == 0))} probes vanish on the chart")
    log.info("data operator: %d probes x %d unknowns", *matrix.shape)
    return DataOperator(chart=chart, probes=tuple(probes), matrix=matrix)


@dataclass(frozen=True)
class InjectivityReport:
    sigma_min: float
    sigma_max: float
    condition: float
    rank: int
    unknowns: int
    singular_values: Tuple[float, ...] = field(repr=False)

    @property
    def injective(self) -> bool:
        return self.rank == self.unknowns


def injectivity_report(op: DataOperator, real: bool = True, rtol: float = SVD_RTOL) -> InjectivityReport:
    _, s, _ = op.svd(real)
    sigma_max = float(s[0])
    rank = int(np.sum(s > rtol * sigma_max))
    unknowns = op.shape[1]
    # fewer singular values than unknowns leaves a null space
    sigma_min = float(s[-1]) if len(s) >= unknowns else 0.0
    condition = sigma_max / sigma_min if sigma_min > 0 else float('inf')
    log.info("data operator: sigma_min=%.3e condition=%.3e rank=%d/%d", sigma_min, condition, rank, unknowns)
    return InjectivityReport(sigma_min=sigma_min, sigma_max=sigma_max, condition=condition, rank=rank,
                             unknowns=unknowns, singular_values=tuple(float(x) for x in s))


def _filter_factors(s: np.ndarray, reg: float, method: str) -> np.ndarray:
    if method == 'tikhonov':
        return s / (s ** 2 + reg ** 2)
    if method == 'tsvd':
        keep = s > reg * s[0] if reg > 0 else s > SVD_RTOL * s[0]
        return np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    raise ParameterError(f"unknown regularization method {method!r}; expected one of {METHODS}")


def recover_q(op: DataOperator, data: np.ndarray, reg: float, method: str = 'tikhonov',
              truth: Optional[ScalarField] = None, real: bool = True) -> Tuple[ScalarField, Dict[str, float]]:
    """
    Tikhonov: argmin ||M dq - d||^2 + reg^2 ||dq||^2 on the normalized system.
    TSVD: drop singular values below reg * sigma_max.
    """
    if reg < 0:
        raise ParameterError(f"regularization must be nonnegative, got {reg}")
    U, s, Vh = op.svd(real)
    b = op.rhs(data, real)
    coefficients = _filter_factors(s, reg, method) * (U.conj().T @ b)
    x = Vh.conj().T @ coefficients
    residual = op.system(real) @ x - b

    estimate = ScalarField(op.chart, x.reshape(op.chart.shape))
    diagnostics = {
        'reg': float(reg),
        'residual_norm': float(np.linalg.norm(residual)),
        'solution_norm': float(np.linalg.norm(x)),
    }
    if truth is not None:
        scale = float(np.linalg.norm(truth.values))
        error = float(np.linalg.norm(estimate.values - truth.values))
        diagnostics['relative_error'] = error / scale if scale > 0 else error
    log.debug("recover_q %s reg=%.2e: %s", method, reg, diagnostics)
    return estimate, diagnostics


def add_noise(data: np.ndarray, level: float, seed: int = 0) -> np.ndarray:
    """Complex Gaussian noise with norm ``level * ||data||``"""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(data.shape) + 1j * rng.standard_normal(data.shape)
    scale = np.linalg.norm(data)
    return data + level * scale * noise / np.linalg.norm(noise)


def l_curve(op: DataOperator, data: np.ndarray, regs: Sequence[float], method: str = 'tikhonov',
            truth: Optional[ScalarField] = None, real: bool = True) -> List[Dict[str, float]]:
    """(reg, residual_norm, solution_norm, relative_error) per regularization, in increasing reg"""
    rows = []
    for reg in sorted(regs):
        _, diagnostics = recover_q(op, data, reg, method, truth, real)
        rows.append(diagnostics)
    return rows


def l_curve_monotone(rows: Sequence[Dict[str, float]], rtol: float = 1e-9) -> bool:
    """Residual nondecreasing and solution norm nonincreasing in reg"""
    residuals = [r['residual_norm'] for r in rows]
    norms = [r['solution_norm'] for r in rows]
    return (all(b >= a * (1 - rtol) for a, b in zip(residuals, residuals[1:]))
            and all(b <= a * (1 + rtol) for a, b in zip(norms, norms[1:])))


@dataclass(frozen=True)
class ClosureCertificate:
    curl_norm: float
    max_functional: float
    max_relative: float
    probe_count: int

    def passed(self, curl_tol: float, functional_tol: float) -> bool:
        return self.curl_norm <= curl_tol and self.max_relative <= functional_tol


def magnetic_probes(chart: CylinderChart, lambdas: Sequence[float] = (0.0, 1.0, 2.0, 3.0),
                    bump_count: int = DEFAULT_BUMPS) -> List[Probe]:
    return [Probe(lam=float(lam), profile=b) for b in bump_family(chart.theta_range, bump_count) for lam in lambdas]


def certify_closed(delta: OneForm, probes: Optional[Sequence[Probe]] = None,
                   width: float = DEFAULT_WIDTH) -> ClosureCertificate:
    """||d delta||_inf and the magnetic functional over the probe family, with Phi the zero-extended pair phase"""
    chart = delta.chart
    probes = magnetic_probes(chart) if probes is None else probes
    curl = exterior_norm(chart, delta)
    Phi = phase_correction(delta, 1, width=width, extension='zero')
    values, relative = [], []
    for probe in probes:
        value = abs(magnetic_limit_functional(delta, Phi, probe.lam, probe.profile))
        scale = magnetic_functional_scale(delta, probe.lam, probe.profile)
        values.append(value)
        relative.append(value / scale if scale > 0 else 0.0)
    certificate = ClosureCertificate(curl_norm=curl, max_functional=max(values, default=0.0),
                                     max_relative=max(relative, default=0.0), probe_count=len(probes))
    log.info("closure certificate: |d delta|=%.3e max functional=%.3e (relative %.3e)",
             certificate.curl_norm, certificate.max_functional, certificate.max_relative)
    return certificate
