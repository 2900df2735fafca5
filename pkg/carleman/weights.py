"""
carleman/weights.py - Convexified limiting weights and the conjugated magnetic operator

For a phase psi (real for Carleman weights, complex for CGO phases)

    P w = e^{psi/h} (h^2 L_{A,q}) (e^{-psi/h} w)
        = -h^2 Lap w + 2h <dpsi, dw> - <dpsi, dpsi> w + h (Lap psi) w
          + i h^2 (d*A) w - 2i h^2 <A, dw> + 2i h <A, dpsi> w + h^2 (<A, A> + q) w

is evaluated term by term, so no exponential is ever formed.
"""

import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from core.cache import OperatorCache, default_cache
from core.errors import NumericError, ParameterError, SolverError
from geometry.calculus import (
    codifferential,
    differential,
    gradient_rows,
    inner,
    interior_index,
    laplace_beltrami,
    laplace_rows,
)
from geometry.chart import CylinderChart
from geometry.fields import OneForm, ScalarField, require_same_chart

log = logging.getLogger(__name__)

OVERFLOW_LIMIT = 1e300

CONJUGATED_TERMS = ('laplacian', 'gradient', 'eikonal', 'weight_laplacian',
                    'codifferential', 'cross', 'weight_magnetic', 'potential')

# Terms that vanish with A = q = 0; they perturb the free Carleman estimate
PERTURBATION_TERMS = ('potential', 'weight_magnetic', 'codifferential', 'cross')


@dataclass(frozen=True)
class ConvexifiedWeight:
    """phi~ = phi + (h / 2 eps) phi^2 with phi = sign * x1; eps = inf gives the plain weight"""
    sign: int
    h: float
    eps: float = 0.1
    max_h_over_eps: float = 0.25
    max_eps: float = 0.25

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ParameterError(f"sign must be +1 or -1, got {self.sign}")
        if not self.h > 0:
            raise ParameterError(f"h must be positive, got {self.h}")
        if not self.eps > 0:
            raise ParameterError(f"eps must be positive, got {self.eps}")
        if self.is_plain:
            return
        if self.eps > self.max_eps:
            raise ParameterError(f"eps = {self.eps} exceeds {self.max_eps}")
        if self.h > self.eps * self.max_h_over_eps + 1e-15:
            raise ParameterError(f"h = {self.h} must be at most {self.max_h_over_eps} * eps = "
                                 f"{self.eps * self.max_h_over_eps:.4g}")

    @classmethod
    def plain(cls, sign: int, h: float) -> 'ConvexifiedWeight':
        return cls(sign=sign, h=h, eps=float('inf'))

    @property
    def is_plain(self) -> bool:
        return bool(np.isinf(self.eps))

    @property
    def convexity(self) -> float:
        """h / eps"""
        return 0.0 if self.is_plain else self.h / self.eps

    def base(self, chart: CylinderChart) -> np.ndarray:
        return self.sign * chart.mesh[0]

    def values(self, chart: CylinderChart) -> ScalarField:
        phi = self.base(chart)
        values = phi + 0.5 * self.convexity * phi ** 2
        slope = 1.0 + self.convexity * phi
        if np.any(slope <= 0):
            raise ParameterError(f"weight is not increasing in sign*x1 on {chart.name}: h/eps too large")
        return ScalarField(chart, values)

    def differential(self, chart: CylinderChart) -> OneForm:
        """d phi~ = sign (1 + (h/eps) phi) dx1, exact"""
        phi = self.base(chart)
        zero = np.zeros(chart.shape)
        return OneForm(chart, self.sign * (1.0 + self.convexity * phi), zero, zero)


def _digest(*arrays: np.ndarray) -> str:
    digest = hashlib.sha1()
    for a in arrays:
        digest.update(np.ascontiguousarray(a).tobytes())
    return digest.hexdigest()


class ConjugatedOperator:
    """e^{psi/h} o (h^2 L_{A,q}) o e^{-psi/h} on one chart; full-grid apply plus interior sparse rows"""

    def __init__(self, chart: CylinderChart, A: OneForm, q: ScalarField, h: float,
                 psi: Optional[ScalarField] = None, dpsi: Optional[OneForm] = None,
                 cache: Optional[OperatorCache] = None):
        if not h > 0:
            raise ParameterError(f"h must be positive, got {h}")
        require_same_chart(chart, A, q)
        self.chart = chart
        self.A = A
        self.q = q
        self.h = float(h)
        self.psi = ScalarField.zeros(chart) if psi is None else psi
        self.dpsi = differential(chart, self.psi) if dpsi is None else dpsi
        require_same_chart(chart, self.psi, self.dpsi)
        self.cache = default_cache if cache is None else cache

    @classmethod
    def for_weight(cls, chart: CylinderChart, A: OneForm, q: ScalarField, weight: ConvexifiedWeight,
                   cache: Optional[OperatorCache] = None) -> 'ConjugatedOperator':
        return cls(chart, A, q, weight.h, weight.values(chart), weight.differential(chart), cache)

    # --- coefficient fields ---

    @cached_property
    def weight_laplacian(self) -> np.ndarray:
        return laplace_beltrami(self.chart, self.psi).values

    @cached_property
    def diagonal(self) -> Dict[str, np.ndarray]:
        """Zeroth-order coefficients, by term"""
        chart, A, h = self.chart, self.A, self.h
        return {
            'eikonal': -inner(chart, self.dpsi, self.dpsi).values,
            'weight_laplacian': h * self.weight_laplacian,
            'codifferential': 1j * h ** 2 * codifferential(chart, A).values,
            'weight_magnetic': 2j * h * inner(chart, A, self.dpsi).values,
            'potential': h ** 2 * (inner(chart, A, A).values + self.q.values),
        }

    @cached_property
    def first_order(self) -> Dict[str, tuple]:
        """Coefficients b^k of b^k d_k w, by term"""
        ginv = self.chart.inverse_metric_diagonal
        h = self.h
        return {
            'gradient': tuple(2.0 * h * g * p for g, p in zip(ginv, self.dpsi)),
            'cross': tuple(-2j * h ** 2 * g * a for g, a in zip(ginv, self.A)),
        }

    # --- full-grid evaluation ---

    def termwise(self, w: ScalarField, terms: Iterable[str] = CONJUGATED_TERMS) -> Dict[str, ScalarField]:
        require_same_chart(self.chart, w)
        terms = tuple(terms)
        unknown = set(terms) - set(CONJUGATED_TERMS)
        if unknown:
            raise ParameterError(f"unknown conjugated-operator terms {sorted(unknown)}")
        out = {}
        dw = differential(self.chart, w) if {'gradient', 'cross'} & set(terms) else None
        for term in terms:
            if term == 'laplacian':
                values = -self.h ** 2 * laplace_beltrami(self.chart, w).values
            elif term in self.first_order:
                values = sum(b * d for b, d in zip(self.first_order[term], dw))
            else:
                values = self.diagonal[term] * w.values
            out[term] = ScalarField(self.chart, _guard(values, term))
        return out

    def apply(self, w: ScalarField, terms: Iterable[str] = CONJUGATED_TERMS) -> ScalarField:
        parts = self.termwise(w, terms)
        total = sum((p.values for p in parts.values()), np.zeros(self.chart.shape, dtype=complex))
        return ScalarField(self.chart, _guard(total, 'total'))

    # --- sparse interior operator ---

    @cached_property
    def key(self):
        return ('conjugated', self.chart.key, self.h,
                _digest(*self.A, self.q.values, self.psi.values, *self.dpsi))

    @cached_property
    def rows(self) -> sp.csr_matrix:
        """P at interior nodes, columns over all nodes; agrees with apply() there"""
        chart = self.chart
        interior = chart.interior_mask
        rows = -self.h ** 2 * laplace_rows(chart, self.cache)
        for coefficients in self.first_order.values():
            for axis, b in enumerate(coefficients):
                if np.any(b[interior]):
                    rows = rows + sp.diags(b[interior]) @ gradient_rows(chart, axis, self.cache)
        diagonal = sum(self.diagonal.values())[interior]
        n_total = int(np.prod(chart.shape))
        identity_rows = sp.csr_matrix((np.ones(diagonal.size), (np.arange(diagonal.size), interior_index(chart))),
                                      shape=(diagonal.size, n_total))
        rows = rows + sp.diags(diagonal) @ identity_rows
        return sp.csr_matrix(rows, dtype=complex)

    @cached_property
    def interior_matrix(self) -> sp.csc_matrix:
        """Dirichlet block: interior rows, interior columns"""
        return sp.csc_matrix(self.rows[:, interior_index(self.chart)])

    def factor(self):
        lu = self.cache.get_factor(self.key)
        if lu is None:
            lu = spla.splu(self.interior_matrix)
            self.cache.set_factor(self.key, lu)
        return lu

    def condition_estimate(self, lu=None) -> float:
        """1-norm condition estimate ||P_II||_1 ||P_II^{-1}||_1"""
        M = self.interior_matrix
        try:
            lu = self.factor() if lu is None else lu
        except RuntimeError:
            return float('inf')
        inverse = spla.LinearOperator(M.shape, dtype=complex,
                                      matvec=lambda x: lu.solve(np.asarray(x, dtype=complex).ravel()),
                                      rmatvec=lambda x: lu.solve(np.asarray(x, dtype=complex).ravel(), trans='H'))
        return float(spla.norm(M, 1) * spla.onenormest(inverse))

    def solve(self, v: ScalarField, lsqr_tol: float = 1e-10) -> ScalarField:
        """w with P w = v at interior nodes and w = 0 on the boundary"""
        require_same_chart(self.chart, v)
        chart = self.chart
        rhs = v.values[chart.interior_mask]
        if not np.any(rhs):
            return ScalarField.zeros(chart)
        try:
            solution = self.factor().solve(rhs)
        except RuntimeError as exc:
            log.warning("sparse LU failed (%s); falling back to least squares", exc)
            result = spla.lsqr(self.interior_matrix, rhs, atol=lsqr_tol, btol=lsqr_tol, iter_lim=20 * rhs.size)
            solution, istop, acond = result[0], result[1], result[6]
            if istop not in (1, 2, 4, 5):
                raise SolverError(f"least-squares fallback did not converge (istop={istop})", condition=acond) from exc
            residual = np.linalg.norm(self.interior_matrix @ solution - rhs) / np.linalg.norm(rhs)
            log.warning("least-squares remainder: relative residual %.3e, condition %.3e", residual, acond)
        if not np.all(np.isfinite(solution)):
            raise SolverError("non-finite solution of the conjugated system", condition=self.condition_estimate())
        values = np.zeros(chart.shape, dtype=complex)
        values[chart.interior_mask] = solution
        return ScalarField(chart, values)


def _guard(values: np.ndarray, label: str) -> np.ndarray:
    if not np.all(np.isfinite(values)) or np.max(np.abs(values), initial=0.0) > OVERFLOW_LIMIT:
        raise NumericError(f"conjugated operator term {label!r} overflowed")
    return values


def conjugate_apply(chart: CylinderChart, A: OneForm, q: ScalarField, weight: ConvexifiedWeight, h: float,
                    u: ScalarField, cache: Optional[OperatorCache] = None) -> ScalarField:
    """e^{phi~/h} (h^2 L_{A,q}) e^{-phi~/h} u"""
    if not np.isclose(weight.h, h):
        raise ParameterError(f"weight was built for h = {weight.h}, not h = {h}")
    return ConjugatedOperator.for_weight(chart, A, q, weight, cache).apply(u)
