import json

import pytest

from conftest import write_ini
from core.cache import OperatorCache
from core.errors import ConfigurationError
from core.pipeline import SUBCOMMANDS, ExperimentPipeline
from main import build_parser, main
from utils.config import ExperimentConfig

SMALL_RECOVER = """
[recover]
grid = 5, 5, 3
lambda_count = 12
"""


def _artifacts(directory):
    return {p.relative_to(directory): p.read_bytes() for p in sorted(directory.rglob('*.csv'))}


def test_parser_lists_every_subcommand():
    parser = build_parser()
    for name in SUBCOMMANDS:
        args = parser.parse_args([name, '--seed', '2', '--grid-scale', '0.5'])
        assert args.subcommand == name
        assert args.seed == 2 and args.grid_scale == 0.5


def test_unknown_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(['teleport'])
    assert exc.value.code == 2


def test_euclid_map_passes(tmp_path):
    assert main(['euclid-map', '--out', str(tmp_path)]) == 0
    verdicts = json.loads((tmp_path / 'euclid-map' / 'verdicts.json').read_text())
    assert verdicts['passed'] is True
    assert set(verdicts['verdicts']) == {'laplacian', 'metric', 'conformal_factor'}
    assert (tmp_path / 'euclid-map' / 'samples.csv').exists()


def test_malformed_config_exits_before_writing(tmp_path):
    config = write_ini(tmp_path / 'bad.ini', "[cgo]\nkappa = abc\n")
    out = tmp_path / 'out'
    assert main(['cgo-build', '--config', config, '--out', str(out)]) == 2
    assert not out.exists()


def test_unknown_preset_is_a_configuration_error(tmp_path):
    config = write_ini(tmp_path / 'bad.ini', "[mollify]\ncorpus = wild\n")
    assert main(['mollify-rates', '--config', config, '--out', str(tmp_path / 'out')]) == 2
    config = write_ini(tmp_path / 'bad.ini', "[dbar]\ntransport_potential = wild\n")
    assert main(['dbar-check', '--config', config, '--out', str(tmp_path / 'out')]) == 2
    assert not (tmp_path / 'out' / 'dbar-check').exists()


def test_runs_are_reproducible(tmp_path):
    config = write_ini(tmp_path / 'small.ini', SMALL_RECOVER)
    for run in ('a', 'b'):
        for name in ('euclid-map', 'recover-q'):
            main([name, '--config', config, '--out', str(tmp_path / run), '--seed', '5'])
    first, second = _artifacts(tmp_path / 'a'), _artifacts(tmp_path / 'b')
    assert first and first == second
    assert (tmp_path / 'a' / 'recover-q' / 'l_curve.csv').exists()


def test_operator_files_on_request(tmp_path):
    config = write_ini(tmp_path / 'small.ini', SMALL_RECOVER + "write_operator = true\n")
    main(['recover-q', '--config', config, '--out', str(tmp_path)])
    operator = tmp_path / 'recover-q' / 'operator'
    meta = json.loads((operator / 'meta.json').read_text())
    assert meta['grid_sizes'] == [5, 5, 3]
    assert meta['columns'] == 75
    assert (operator / 'rows.csv').exists() and (operator / 'matrix.csv').exists()


def test_pipeline_rejects_unknown_subcommand(tmp_path):
    pipeline = ExperimentPipeline(OperatorCache(), ExperimentConfig.load(None, str(tmp_path)))
    with pytest.raises(ConfigurationError):
        pipeline.set_subcommand('teleport')
    with pytest.raises(ConfigurationError):
        list(pipeline.run())


def test_advect_pipeline(tmp_path):
    config = write_ini(tmp_path / 'advect.ini', "[experiment]\ngrid = 9, 9, 5\n" + SMALL_RECOVER)
    pipeline = ExperimentPipeline(OperatorCache(), ExperimentConfig.load(config, str(tmp_path)))
    events = list(pipeline.run('advect'))
    verdicts = {e['data']['name']: e['data'] for e in events if e['type'] == 'verdict'}
    assert verdicts['conversion']['passed']
    assert verdicts['certificate']['passed']
    assert verdicts['certificate']['fields_equal'] is False
    assert verdicts['certificate']['certified_equal'] is False
    assert 'recover.injectivity' in verdicts
    assert events[-1] == {'type': 'progress', 'message': 'advect complete', 'value': 100}
    for name in ('dq.csv', 'certificate.csv', 'verdicts.json', 'recover/estimate.csv'):
        assert (tmp_path / 'advect' / name).exists()


@pytest.mark.parametrize('expression', ['x1 +', 'x1 * y'])
def test_bad_test_function_is_a_configuration_error(tmp_path, expression):
    config = write_ini(tmp_path / 'euclid.ini', f"[euclid]\ntest_function = {expression}\n")
    assert main(['euclid-map', '--config', config, '--out', str(tmp_path / 'out')]) == 2


def test_advect_certifies_equal_fields(tmp_path):
    config = write_ini(tmp_path / 'advect.ini', "[experiment]\ngrid = 9, 9, 5\n[advect]\ngauge =\n" + SMALL_RECOVER)
    pipeline = ExperimentPipeline(OperatorCache(), ExperimentConfig.load(config, str(tmp_path)))
    verdicts = {e['data']['name']: e['data'] for e in pipeline.run('advect') if e['type'] == 'verdict'}
    certificate = verdicts['certificate']
    assert certificate['passed']
    assert certificate['fields_equal'] and certificate['certified_equal']
    assert certificate['w_max'] <= 1e-12
    assert pipeline.passed
