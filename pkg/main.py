#!/usr/bin/env python3
"""
Magnetic Schrodinger Lab - Command line runner
Runs one verification ladder or the recovery pipeline and writes CSV/JSON artifacts
"""

import argparse
import logging
import sys
from typing import List, Optional

from core.cache import OperatorCache
from core.errors import ConfigurationError, LabError
from core.pipeline import SUBCOMMANDS, ExperimentPipeline
from utils.config import ExperimentConfig

log = logging.getLogger('lab')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='lab', description=__doc__.strip().splitlines()[0])
    parser.add_argument('subcommand', choices=SUBCOMMANDS, help='experiment to run')
    parser.add_argument('--config', default=None, help='INI file with [section] key = value overrides')
    parser.add_argument('--out', default='out', help='artifact directory (default: %(default)s)')
    parser.add_argument('--seed', type=int, default=0, help='seed for sampled families and noise')
    parser.add_argument('--grid-scale', type=float, default=1.0, help='multiply every grid size')
    parser.add_argument('--verbose', action='store_true', help='log at DEBUG level')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)-7s %(name)s: %(message)s')
    try:
        config = ExperimentConfig.load(args.config, args.out, args.seed, args.grid_scale)
    except ConfigurationError as e:
        log.error("Configuration error: %s", e)
        return EXIT_CONFIG

    pipeline = ExperimentPipeline(OperatorCache(), config)
    try:
        for event in pipeline.run(args.subcommand):
            if event['type'] == 'progress':
                log.info("[%3d%%] %s", event['value'], event['message'])
            elif event['type'] == 'verdict':
                data = event['data']
                log.info("%s %s (%s)", 'PASS' if data['passed'] else 'FAIL', data['name'], data['anchor'])
    except ConfigurationError as e:
        log.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        pipeline.stop()
        log.warning("Interrupted")
        return EXIT_FAILED
    except LabError as e:
        log.error("%s failed: %s", args.subcommand, e)
        return EXIT_FAILED

    return EXIT_OK if pipeline.passed else EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
