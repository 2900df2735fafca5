# ===========================================
# utils/__init__.py
# ===========================================
"""Configuration, artifact files and coefficient presets"""

from .config import Config, ExperimentConfig
from .io import read_field, write_bundle, write_csv, write_field, write_json
from .presets import build_chart, electric, potential, scenario, vector_field

__all__ = [
    'Config',
    'ExperimentConfig',
    'read_field',
    'write_bundle',
    'write_csv',
    'write_field',
    'write_json',
    'build_chart',
    'electric',
    'potential',
    'scenario',
    'vector_field',
]
