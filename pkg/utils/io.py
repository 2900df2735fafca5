# ===========================================
# utils/io.py - CSV and JSON artifacts
# ===========================================
"""
Every CSV starts with a header row; floats are written with 17 significant
digits and JSON keys are sorted, so equal inputs give byte-identical files.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from core.errors import ConfigurationError
from core.report import ReportBundle
from geometry.chart import CylinderChart
from geometry.fields import ScalarField

log = logging.getLogger(__name__)

FIELD_COLUMNS = ('i1', 'ir', 'itheta', 're', 'im')
LADDER_COLUMNS = ('bundle', 'quantity', 'parameter_name', 'parameter', 'norm', 'normalized_ratio')


def _format(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row of length {len(row)} does not match {len(columns)} columns in {path.name}")
            writer.writerow([_format(v) for v in row])
    log.debug("wrote %s", path)
    return path


def read_csv(path: Path) -> Tuple[List[str], List[List[str]]]:
    with open(path, newline='') as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': _jsonable(value.real), 'im': _jsonable(value.imag)}
    return value


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
        f.write('\n')
    log.debug("wrote %s", path)
    return path


def read_json(path: Path) -> Dict[str, Any]:
    with open(path) as f:
        return json.load(f)


# --- fields ---

def write_field(path: Path, field: ScalarField) -> Path:
    """One row per node in C order: grid indices, real and imaginary parts"""
    index = np.indices(field.chart.shape).reshape(3, -1).T
    values = field.values.ravel()
    rows = ((i, j, k, v.real, v.imag) for (i, j, k), v in zip(index, values))
    return write_csv(path, FIELD_COLUMNS, rows)


def read_field(path: Path, chart: CylinderChart) -> ScalarField:
    header, rows = read_csv(path)
    if tuple(header) != FIELD_COLUMNS:
        raise ConfigurationError(f"{path} is not a field file (header {header})")
    values = np.full(chart.shape, np.nan, dtype=complex)
    for i, j, k, re, im in rows:
        values[int(i), int(j), int(k)] = complex(float(re), float(im))
    if np.isnan(values.real).any():
        raise ConfigurationError(f"{path} does not cover the {chart.shape} grid")
    return ScalarField(chart, values)


# --- reports ---

def write_bundle(path: Path, bundles: Sequence[ReportBundle]) -> Path:
    """Ladder CSV: one row per (report, rung)"""
    rows = []
    for bundle in bundles:
        for report in bundle:
            rows.extend((bundle.name, report.name, report.parameter_name) + tuple(row) for row in report.rows())
    return write_csv(path, LADDER_COLUMNS, rows)


def bundle_verdicts(bundles: Sequence[ReportBundle]) -> Dict[str, Any]:
    return {f"{bundle.name}.{key}": report.verdict()
            for bundle in bundles for key, report in bundle.reports.items()}


# --- data operator ---

def write_data_operator(directory: Path, op) -> Tuple[Path, Path, Path]:
    """rows.csv (probe per row), matrix.csv (entries, real and imaginary) and meta.json"""
    directory = Path(directory)
    probes = ((i, p.lam, p.profile.label(), p.center.real, p.center.imag) for i, p in enumerate(op.probes))
    rows_path = write_csv(directory / 'rows.csv', ('row', 'lambda', 'profile', 'center_re', 'center_im'), probes)
    n_rows, n_cols = op.shape
    entries = ((i, j, op.matrix[i, j].real, op.matrix[i, j].imag) for i in range(n_rows) for j in range(n_cols))
    matrix_path = write_csv(directory / 'matrix.csv', ('row', 'column', 're', 'im'), entries)
    meta = {
        'chart': op.chart.name,
        'grid_sizes': list(op.chart.grid_sizes),
        'x1_range': list(op.chart.x1_range),
        'r_range': list(op.chart.r_range),
        'theta_range': list(op.chart.theta_range),
        'rows': n_rows,
        'columns': n_cols,
        'column_order': 'C order over (i1, ir, itheta)',
    }
    meta_path = write_json(directory / 'meta.json', meta)
    return rows_path, matrix_path, meta_path
