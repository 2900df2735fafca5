# ===========================================
# utils/config.py - Configuration management
# ===========================================

import configparser
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from core.errors import ConfigurationError

log = logging.getLogger(__name__)

# ladders that must be strictly decreasing
DECREASING = {
    ('mollify', 'tau_list'), ('cgo', 'h_list'), ('carleman', 'h_list'), ('carleman', 'interior_h_list'),
    ('identity', 'h_list'),
}


class Config:
    """Experiment configuration manager: INI sections over typed defaults"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = Path(config_file) if config_file else None
        self.defaults: Dict[str, Dict[str, Any]] = {
            'experiment': {
                'chart': 'flat-cylinder',
                'grid': (17, 17, 9),
            },

            # Mollifier ladders
            'mollify': {
                'chart': 'flat-cylinder',
                'grid': (161, 9, 9),
                'corpus': 'kinked',
                'p': 2.0,
                'tau_list': (0.2, 0.1, 0.05, 0.025),
                'region': 'chart',
                'potential': 'rough-kink',
                'bound_factor': 2.0,
            },

            # Cauchy transform refinement and transport order
            'dbar': {
                'sizes': (33, 65, 129),
                'half_width': 1.2,
                'radius': 0.9,
                'min_ratio': 1.7,
                'max_ratio': 2.3,
                'transport_potential': 'smooth',
                'transport_h': 0.2,
                'transport_sizes': (9, 17, 33),
                'transport_theta_nodes': 5,
                'min_transport_order': 0.8,
            },

            # CGO construction
            'cgo': {
                'potential': 'rough-kink',
                'electric': 'smooth-bump',
                'h_list': (0.4, 0.2, 0.1, 0.05),
                'kappa': 0.25,
                'lam': 1.0,
                'b_center': 0.0,
                'b_half_width': 0.4,
                'width': 0.5,
                'manufactured_h': 0.2,
                'manufactured_tol': 1e-6,
            },

            # Carleman estimates
            'carleman': {
                'potential': 'rough-kink',
                'electric': 'smooth-bump',
                'include_zero': True,
                'h_list': (0.05, 0.025),
                'eps': 0.1,
                'max_h_over_eps': 0.5,
                'samples': 100,
                'threshold': 0.01,
                'collar_width': 0.25,
                'interior_h_list': (0.2, 0.1, 0.05),
                'bound_factor': 2.0,
            },

            # Green formula, gauge identity and limit functionals
            'identity': {
                'scenarios': ('gauge-sine', 'gauge-bubble', 'gauge-poly'),
                'generic': 'generic-shear',
                'h_list': (0.4, 0.2, 0.1, 0.05),
                'lam': 0.5,
                'lambda_list': (0.0, 1.0, 2.0, 3.0),
                'bump_count': 6,
                'green_sizes': (9, 17, 33),
                'green_order': 1.8,
                'identity_tol': 1e-2,
                'functional_tol': 1e-2,
                'collar_width': 0.25,
            },

            # Electric recovery
            'recover': {
                'chart': 'flat-cylinder',
                'grid': (12, 12, 6),
                'electric': 'smooth-bump',
                'lambda_min': -6.0,
                'lambda_max': 6.0,
                'lambda_count': 24,
                'bump_count': 6,
                'reg': 1e-6,
                'method': 'tikhonov',
                'noise': 0.01,
                'reg_list': (1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0),
                'error_tol': 0.10,
                'write_operator': False,
            },

            'euclid': {
                'test_function': 'x3',
                'tol': 1e-6,
            },

            'advect': {
                'X1': 'swirl',
                'X2': 'swirl',
                'gauge': 'gauge-sine',
                'advection_tol': 1e-3,
                'certificate_tol': 1e-3,
            },
        }

    def load(self) -> Dict[str, Dict[str, Any]]:
        """Merge the config file over the defaults; ConfigurationError on anything unknown or unparsable"""
        settings = {section: dict(values) for section, values in self.defaults.items()}
        if self.config_file is None:
            return settings
        if not self.config_file.exists():
            raise ConfigurationError(f"config file {self.config_file} does not exist")

        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(self.config_file, 'r') as f:
                parser.read_file(f)
        except (configparser.Error, UnicodeDecodeError) as e:
            raise ConfigurationError(f"cannot parse {self.config_file}: {e}") from e

        for section in parser.sections():
            if section not in self.defaults:
                raise ConfigurationError(f"unknown section [{section}]")
            for key, raw in parser.items(section):
                if key not in self.defaults[section]:
                    raise ConfigurationError(f"unknown key {key!r} in [{section}]")
                settings[section][key] = _parse(raw, self.defaults[section][key], f"{section}.{key}")
        _validate(settings)
        log.debug("loaded config %s", self.config_file)
        return settings

    def save(self, settings: Dict[str, Dict[str, Any]], path: Optional[Path] = None):
        """Write the values that differ from the defaults"""
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for section, values in settings.items():
            changed = {key: value for key, value in values.items()
                       if self.defaults.get(section, {}).get(key) != value}
            if changed:
                parser[section] = {key: _format(value) for key, value in changed.items()}
        target = Path(path) if path else self.config_file
        if target is None:
            raise ConfigurationError("no config file to save to")
        with open(target, 'w') as f:
            parser.write(f)

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get configuration value"""
        settings = self.load()
        return settings.get(section, {}).get(key, default)


def _parse(raw: str, default: Any, name: str) -> Any:
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            lowered = raw.lower()
            if lowered in ('true', 'yes', 'on', '1'):
                return True
            if lowered in ('false', 'no', 'off', '0'):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            kind = type(default[0]) if default else str
            items = [item.strip() for item in raw.split(',') if item.strip()]
            if not items:
                raise ValueError("empty list")
            return tuple(kind(item) for item in items)
        return raw
    except ValueError as e:
        raise ConfigurationError(f"{name}: cannot parse {raw!r} like {default!r}") from e


def _format(value: Any) -> str:
    if isinstance(value, tuple):
        return ', '.join(str(v) for v in value)
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def _validate(settings: Dict[str, Dict[str, Any]]):
    for section, key in DECREASING:
        ladder = settings[section][key]
        if len(ladder) < 2 or any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigurationError(f"{section}.{key} must be strictly decreasing with at least two rungs, "
                                     f"got {ladder}")
    for section in settings:
        grid = settings[section].get('grid')
        if grid is not None and (len(grid) != 3 or min(grid) < 3):
            raise ConfigurationError(f"{section}.grid needs three sizes of at least 3 nodes, got {grid}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Merged settings plus the run options from the command line"""
    settings: Dict[str, Dict[str, Any]]
    out_dir: Path
    seed: int = 0
    grid_scale: float = 1.0
    source: Optional[Path] = None

    def __post_init__(self):
        if not self.grid_scale > 0:
            raise ConfigurationError(f"grid scale must be positive, got {self.grid_scale}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be nonnegative, got {self.seed}")

    @classmethod
    def load(cls, config_file: Optional[str], out_dir: str, seed: int = 0,
             grid_scale: float = 1.0) -> 'ExperimentConfig':
        settings = Config(config_file).load()
        return cls(settings=settings, out_dir=Path(out_dir), seed=int(seed), grid_scale=float(grid_scale),
                   source=Path(config_file) if config_file else None)

    def section(self, name: str) -> Dict[str, Any]:
        if name not in self.settings:
            raise ConfigurationError(f"unknown section [{name}]")
        return self.settings[name]

    def grid(self, section: str) -> Tuple[int, int, int]:
        values = self.settings[section].get('grid', self.settings['experiment']['grid'])
        return tuple(int(n) for n in values)
