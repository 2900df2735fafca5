# ===========================================
# checks/advect.py
# ===========================================

import logging
from typing import Generator, Tuple

from checks.identity_check import green_fields
from checks.recover_q import RecoverCheck
from core.check import BaseCheck, Event
from core.errors import DomainError
from geometry.calculus import magnetic_apply
from geometry.chart import CylinderChart
from geometry.fields import ScalarField, VectorField
from geometry.quadrature import lp_norm
from geometry.transforms import advection_apply, advection_to_magnetic
from identity.gauge import advection_certificate
from utils.io import write_field
from utils.presets import gauge_shift, vector_field

log = logging.getLogger(__name__)


class AdvectCheck(BaseCheck):
    """
    Advection fields X1 and X2 = X2 preset + grad phi: conversion to magnetic
    coefficients, recovery of the induced electric difference, and the zero
    certificate driven by the recovered difference. The certificate verdict
    passes when it accepts X1 = X2 for equal fields and rejects a gauge shift.
    """

    name = 'advect'
    section = 'advect'

    def fields(self, chart: CylinderChart) -> Tuple[VectorField, VectorField]:
        s = self.settings
        X1 = vector_field(chart, s['X1'])
        X2 = vector_field(chart, s['X2'])
        if s['gauge']:
            X2 = X2 + gauge_shift(chart, s['gauge'])
        return X1, X2

    def run(self) -> Generator[Event, None, None]:
        s = self.settings
        chart = self.chart('experiment')
        X1, X2 = self.fields(chart)

        yield self.progress("Advection to magnetic coefficients", 5)
        A, q = advection_to_magnetic(chart, X1)
        u, _ = green_fields(chart)
        advection = advection_apply(chart, X1, u)
        gap = lp_norm(chart, advection - magnetic_apply(chart, A, q, u)) / lp_norm(chart, advection)
        yield self.verdict('conversion', 'advection operator equals its magnetic Schrodinger form',
                           gap <= s['advection_tol'], relative_difference=gap, tol=s['advection_tol'])

        yield self.progress("Recovering the induced electric difference", 15)
        recover_chart = self.chart('recover')
        R1, R2 = self.fields(recover_chart)
        dq = advection_to_magnetic(recover_chart, R1)[1] - advection_to_magnetic(recover_chart, R2)[1]
        write_field(self.out_dir / 'dq.csv', dq)
        recover = RecoverCheck(self.cache, self.config, self.out_dir / 'recover')
        for event in recover.run(truth=ScalarField(recover_chart, dq.values.real)):
            if not self._running:
                recover.stop()
                return
            if event['type'] == 'verdict':
                data = dict(event['data'], name=f"recover.{event['data']['name']}")
                self.verdicts[data['name']] = data
                yield {'type': 'verdict', 'data': data}
            else:
                yield self.progress(event['message'], 15 + int(0.6 * event['value']))

        yield self.progress("Zero certificate from the recovered electric difference", 80)
        fields_equal = not s['gauge'] and s['X1'] == s['X2']
        try:
            certificate = advection_certificate(recover_chart, R1, R2, dq=recover.estimate, cache=self.cache)
        except DomainError as e:
            log.warning("no gauge potential for X2 - X1: %s", e)
            yield self.verdict('certificate', 'zero certificate accepts X1 = X2 exactly when the fields agree',
                               not fields_equal, certified_equal=False, fields_equal=fields_equal,
                               closed=False, tol=s['certificate_tol'])
        else:
            write_field(self.out_dir / 'certificate.csv', certificate.w)
            certified = certificate.passed(s['certificate_tol'])
            yield self.verdict('certificate', 'zero certificate accepts X1 = X2 exactly when the fields agree',
                               certified == fields_equal, certified_equal=certified, fields_equal=fields_equal,
                               closed=True, w_max=certificate.w_max, psi_max=certificate.psi_max,
                               psi_boundary_max=certificate.psi_boundary_max, gap_max=certificate.gap_max,
                               tol=s['certificate_tol'])
        self.finish(chart=chart.name, grid=list(chart.shape), X1=s['X1'], X2=s['X2'], gauge=s['gauge'])
