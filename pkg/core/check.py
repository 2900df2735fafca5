"""
core/check.py - Base check interface
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Generator, Iterable, Optional

from core.cache import OperatorCache
from core.report import ConvergenceReport, ReportBundle
from geometry.chart import CylinderChart
from utils.config import ExperimentConfig
from utils.io import bundle_verdicts, write_bundle, write_json
from utils.presets import build_chart

log = logging.getLogger(__name__)

Event = Dict[str, Any]


class BaseCheck(ABC):
    """Base class for all experiment subcommands"""

    name: str = ''
    section: str = ''

    def __init__(self, cache: OperatorCache, config: ExperimentConfig, out_dir: Path):
        self.cache = cache
        self.config = config
        self.out_dir = Path(out_dir)
        self._running = True
        self.verdicts: Dict[str, Dict[str, Any]] = {}

    def stop(self):
        """Stop between rungs"""
        self._running = False

    @property
    def settings(self) -> Dict[str, Any]:
        return self.config.section(self.section)

    def chart(self, section: Optional[str] = None) -> CylinderChart:
        section = section or self.section
        settings = self.config.section(section)
        name = settings.get('chart', self.config.settings['experiment']['chart'])
        return build_chart(name, self.config.grid(section), self.config.grid_scale)

    @abstractmethod
    def run(self) -> Generator[Event, None, None]:
        """
        Yield {'type': 'progress', 'message', 'value'} while working and
        {'type': 'verdict', 'data'} for every judged property
        """
        pass

    # --- helpers for subclasses ---

    def progress(self, message: str, value: int) -> Event:
        return {'type': 'progress', 'message': message, 'value': int(value)}

    def verdict(self, key: str, anchor: str, passed: bool, **measured) -> Event:
        data = {'name': key, 'anchor': anchor, 'passed': bool(passed)}
        data.update(measured)
        self.verdicts[key] = data
        return {'type': 'verdict', 'data': data}

    def report_verdict(self, key: str, report: ConvergenceReport) -> Event:
        data = dict(report.verdict())
        data['ratios'] = list(report.normalized_ratios)
        self.verdicts[key] = data
        return {'type': 'verdict', 'data': {**data, 'name': key}}

    def bundle_events(self, bundles: Iterable[ReportBundle]) -> Generator[Event, None, None]:
        for key, data in bundle_verdicts(list(bundles)).items():
            self.verdicts[key] = data
            yield {'type': 'verdict', 'data': {**data, 'name': key}}

    def write_ladders(self, bundles: Iterable[ReportBundle], filename: str = 'ladders.csv') -> Path:
        return write_bundle(self.out_dir / filename, list(bundles))

    def finish(self, **extra) -> Path:
        """verdicts.json with every verdict recorded so far"""
        payload = {
            'subcommand': self.name,
            'seed': self.config.seed,
            'grid_scale': self.config.grid_scale,
            'passed': all(v['passed'] for v in self.verdicts.values()),
            'verdicts': self.verdicts,
        }
        payload.update(extra)
        path = write_json(self.out_dir / 'verdicts.json', payload)
        log.info("%s: %d verdicts written to %s", self.name, len(self.verdicts), path)
        return path
