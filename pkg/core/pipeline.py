"""
core/pipeline.py - Experiment orchestrator
"""

import logging
from typing import Dict, Generator, Optional

from core.cache import OperatorCache
from core.errors import ConfigurationError
from utils.config import ExperimentConfig

log = logging.getLogger(__name__)

SUBCOMMANDS = ('mollify-rates', 'dbar-check', 'cgo-build', 'carleman-check', 'identity', 'recover-q',
               'euclid-map', 'advect')


class ExperimentPipeline:
    """Runs one subcommand through its check and relays progress and verdicts"""

    def __init__(self, cache: OperatorCache, config: ExperimentConfig):
        self.cache = cache
        self.config = config
        self._subcommand: Optional[str] = None
        self._running = False
        self._check = None
        self.passed: Optional[bool] = None

    def set_subcommand(self, subcommand: str):
        if subcommand not in SUBCOMMANDS:
            raise ConfigurationError(f"unknown subcommand {subcommand!r}; expected one of {SUBCOMMANDS}")
        self._subcommand = subcommand

    def stop(self):
        self._running = False
        if self._check:
            self._check.stop()

    def run(self, subcommand: Optional[str] = None) -> Generator[Dict, None, None]:
        if subcommand is not None:
            self.set_subcommand(subcommand)
        if self._subcommand is None:
            raise ConfigurationError("no subcommand selected")

        self._running = True
        self._check = self._get_check()
        yield {'type': 'progress', 'message': f'Starting {self._subcommand}...', 'value': 0}

        failed = []
        for event in self._check.run():
            if not self._running:
                return
            if event['type'] == 'verdict' and not event['data']['passed']:
                failed.append(event['data']['name'])
            yield event

        self.passed = not failed
        if failed:
            log.warning("%s: %d verdict(s) failed: %s", self._subcommand, len(failed), ', '.join(failed))
        yield {'type': 'progress', 'message': f'{self._subcommand} complete', 'value': 100}

    def _get_check(self):
        out_dir = self.config.out_dir / self._subcommand
        if self._subcommand == "mollify-rates":
            from checks.mollify_rates import MollifyRatesCheck
            return MollifyRatesCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "dbar-check":
            from checks.dbar_check import DbarCheck
            return DbarCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "cgo-build":
            from checks.cgo_build import CGOBuildCheck
            return CGOBuildCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "carleman-check":
            from checks.carleman_check import CarlemanCheck
            return CarlemanCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "identity":
            from checks.identity_check import IdentityCheck
            return IdentityCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "recover-q":
            from checks.recover_q import RecoverCheck
            return RecoverCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "euclid-map":
            from checks.euclid_map import EuclidMapCheck
            return EuclidMapCheck(self.cache, self.config, out_dir)
        elif self._subcommand == "advect":
            from checks.advect import AdvectCheck
            return AdvectCheck(self.cache, self.config, out_dir)
        raise ConfigurationError(f"unknown subcommand {self._subcommand!r}")
