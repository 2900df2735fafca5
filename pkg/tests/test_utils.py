import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import write_ini
from core.errors import ConfigurationError
from geometry.fields import ScalarField
from utils.config import Config, ExperimentConfig
from utils.io import read_field, write_csv, write_field, write_json
from utils.presets import GAUGES, build_chart, electric, potential, scaled_grid, vector_field


def test_defaults_without_file():
    settings = Config().load()
    assert settings['mollify']['tau_list'] == (0.2, 0.1, 0.05, 0.025)
    assert settings['recover']['grid'] == (12, 12, 6)
    assert settings['carleman']['include_zero'] is True


def test_overrides_are_typed(tmp_path):
    path = write_ini(tmp_path / 'lab.ini', """
[cgo]
h_list = 0.4, 0.2
kappa = 0.3

[recover]
grid = 5, 5, 3
lambda_count = 12
write_operator = yes

[advect]
X1 = unit-x1
""")
    settings = Config(path).load()
    assert settings['cgo']['h_list'] == (0.4, 0.2)
    assert settings['cgo']['kappa'] == 0.3
    assert settings['recover']['grid'] == (5, 5, 3)
    assert settings['recover']['lambda_count'] == 12
    assert settings['recover']['write_operator'] is True
    assert settings['advect']['X1'] == 'unit-x1'
    assert settings['cgo']['lam'] == 1.0


@pytest.mark.parametrize('text', [
    "[nowhere]\nkey = 1\n",
    "[cgo]\nsigma = 1\n",
    "[cgo]\nkappa = abc\n",
    "[mollify]\ntau_list = 0.1, 0.2\n",
    "[identity]\nh_list = 0.4\n",
    "[experiment]\ngrid = 5, 2, 3\n",
    "[carleman]\ninclude_zero = maybe\n",
    "kappa = 0.3\n",
])
def test_invalid_files(tmp_path, text):
    with pytest.raises(ConfigurationError):
        Config(write_ini(tmp_path / 'bad.ini', text)).load()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        Config(str(tmp_path / 'absent.ini')).load()


def test_save_writes_only_changes(tmp_path):
    config = Config()
    settings = config.load()
    settings['cgo']['kappa'] = 0.3
    settings['identity']['lambda_list'] = (0.0, 1.0)
    path = tmp_path / 'saved.ini'
    config.save(settings, path)
    text = path.read_text()
    assert '[cgo]' in text and '[identity]' in text
    assert '[recover]' not in text
    reloaded = Config(str(path)).load()
    assert reloaded['cgo']['kappa'] == 0.3
    assert reloaded['identity']['lambda_list'] == (0.0, 1.0)
    with pytest.raises(ConfigurationError):
        Config().save(settings)


def test_experiment_config(tmp_path):
    config = ExperimentConfig.load(None, str(tmp_path), seed=3, grid_scale=0.5)
    assert config.grid('dbar') == (17, 17, 9)
    assert config.grid('recover') == (12, 12, 6)
    with pytest.raises(ConfigurationError):
        config.section('nowhere')
    with pytest.raises(ConfigurationError):
        ExperimentConfig.load(None, str(tmp_path), grid_scale=0.0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig.load(None, str(tmp_path), seed=-1)


def test_field_file_round_trip(tmp_path, flat_chart):
    field = electric(flat_chart, 'smooth-bump') * (1.0 + 0.5j)
    path = write_field(tmp_path / 'field.csv', field)
    assert_allclose(read_field(path, flat_chart).values, field.values, rtol=1e-15)


def test_field_file_errors(tmp_path, flat_chart):
    path = write_csv(tmp_path / 'other.csv', ('a', 'b'), [(1, 2)])
    with pytest.raises(ConfigurationError):
        read_field(path, flat_chart)
    partial = write_csv(tmp_path / 'partial.csv', ('i1', 'ir', 'itheta', 're', 'im'), [(0, 0, 0, 1.0, 0.0)])
    with pytest.raises(ConfigurationError):
        read_field(partial, flat_chart)


def test_csv_and_json_formatting(tmp_path):
    path = write_csv(tmp_path / 'out' / 'table.csv', ('name', 'value', 'ok'), [('a', 0.1, True), ('b', 2, False)])
    assert path.read_text() == "name,value,ok\na,0.10000000000000001,true\nb,2,false\n"
    with pytest.raises(ValueError):
        write_csv(tmp_path / 'short.csv', ('a', 'b'), [(1,)])
    payload = json.loads(write_json(tmp_path / 'v.json', {'b': float('nan'), 'a': np.float64(1.5),
                                                          'z': 1 + 2j}).read_text())
    assert payload == {'a': 1.5, 'b': 'nan', 'z': {'re': 1.0, 'im': 2.0}}


def test_unknown_presets(flat_chart):
    with pytest.raises(ConfigurationError):
        build_chart('torus')
    with pytest.raises(ConfigurationError):
        potential(flat_chart, 'wild')
    with pytest.raises(ConfigurationError):
        electric(flat_chart, 'wild')
    with pytest.raises(ConfigurationError):
        vector_field(flat_chart, 'wild')


def test_gauge_presets_vanish_on_the_boundary(chart):
    for name, build in GAUGES.items():
        phi = build(chart)
        assert isinstance(phi, ScalarField)
        assert np.max(np.abs(phi.values[chart.boundary_mask])) < 1e-12, name
        assert np.max(np.abs(phi.values)) > 0.01, name


def test_scaled_grid_keeps_odd_sizes():
    assert scaled_grid((17, 17, 9), 0.5) == (9, 9, 5)
    assert all(n % 2 for n in scaled_grid((12, 12, 6), 1.5))
    assert scaled_grid((5, 5, 3), 0.1) == (3, 3, 3)
    assert build_chart('flat-cylinder', (17, 17, 9), 0.5).shape == (9, 9, 5)
