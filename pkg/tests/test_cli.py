import io
import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from ccme import create_cli
from ccme.errors import NumericError
from ccme.estimators import load_model
from config import TestingConfig


@pytest.fixture(scope='module')
def cli():
    return create_cli(TestingConfig)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope='module')
def data_file(cli, tmp_path_factory):
    path = tmp_path_factory.mktemp('data') / 'data.csv'
    result = CliRunner().invoke(cli, ['simulate', '--n', '200', '--seed', '0', '--out', str(path)])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture(scope='module')
def model_file(cli, data_file, tmp_path_factory):
    path = tmp_path_factory.mktemp('model') / 'rr.npz'
    result = CliRunner().invoke(cli, ['fit', str(data_file), '--out', str(path)])
    assert result.exit_code == 0, result.output
    return path


def test_simulate_writes_data_and_metadata(data_file):
    lines = data_file.read_text().splitlines()
    assert len(lines) == 201
    assert lines[0] == ','.join([f'x{j}' for j in range(1, 11)] + ['a', 'y'])
    frame = pd.read_csv(data_file)
    assert set(frame['a'].unique()) <= {0, 1}

    meta = json.loads(data_file.with_name('data.meta.json').read_text())
    assert meta['seed'] == 0 and meta['scenario'] == 'a' and meta['n'] == 200
    assert meta['v_columns'] == [1, 2, 3, 4, 5]


def test_simulate_is_reproducible(cli, runner, data_file, tmp_path):
    again = tmp_path / 'again.csv'
    result = runner.invoke(cli, ['simulate', '--n', '200', '--seed', '0', '--out', str(again)])
    assert result.exit_code == 0
    assert again.read_bytes() == data_file.read_bytes()
    assert result.stdout == ''


def test_simulate_output_error(cli, runner, tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('')
    result = runner.invoke(cli, ['simulate', '--n', '20', '--out', str(blocker / 'data.csv')])
    assert result.exit_code == 2
    assert 'cannot write' in result.output


def test_simulate_rejects_a_negative_seed(cli, runner, tmp_path):
    out = tmp_path / 'data.csv'
    result = runner.invoke(cli, ['simulate', '--n', '50', '--seed', '-1', '--out', str(out)])
    assert result.exit_code == 4
    assert 'seed must be non-negative' in result.output
    assert not out.exists()


def test_fit_writes_a_loadable_model(model_file):
    model = load_model(model_file)
    assert (model.method, model.variant) == ('rr', 'dr')
    assert model.d_v == 5
    assert model.diagnostics['n'] == 200


def test_fit_rejects_grid_mismatch(cli, runner, data_file, tmp_path):
    config = tmp_path / 'grid.json'
    config.write_text(json.dumps({'method': 'nk', 'grid_size': 3, 'grid_points': [0, 10, 20],
                                  'stage2_grid_points': [0, 10, 21]}))
    result = runner.invoke(cli, ['fit', str(data_file), '--config', str(config),
                                 '--out', str(tmp_path / 'nk.npz')])
    assert result.exit_code == 4
    assert 'grid mismatch' in result.output


def test_fit_without_treated_rows(cli, runner, tmp_path):
    path = tmp_path / 'controls.csv'
    frame = pd.DataFrame(np.random.default_rng(0).normal(size=(20, 6)),
                         columns=[f'x{j}' for j in range(1, 7)])
    frame['a'] = 0
    frame['y'] = 1.0
    frame.to_csv(path, index=False)
    result = runner.invoke(cli, ['fit', str(path), '--out', str(tmp_path / 'm.npz')])
    assert result.exit_code == 4


def test_fit_rejects_malformed_data(cli, runner, tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('x1,a,y\n1.0,2,3.0\n')
    result = runner.invoke(cli, ['fit', str(path), '--out', str(tmp_path / 'm.npz')])
    assert result.exit_code == 3


def test_density_to_stdout(cli, runner, model_file):
    result = runner.invoke(cli, ['density', str(model_file), '--v', '0,0,0,0,0',
                                 '--profile', 'v1', '--points', '25'])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert list(frame.columns) == ['v_id', 'y', 'density']
    assert frame.groupby('v_id').size().tolist() == [25, 25]
    assert np.isfinite(frame['density']).all()


def test_density_single_grid_point(cli, runner, model_file, tmp_path):
    out = tmp_path / 'curve.csv'
    result = runner.invoke(cli, ['density', str(model_file), '--profile', 'v2', '--grid', '12.5',
                                 '--out', str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    assert len(frame) == 1 and frame['y'].iloc[0] == 12.5


def test_density_errors(cli, runner, model_file, tmp_path):
    result = runner.invoke(cli, ['density', str(model_file), '--v', '1,2'])
    assert result.exit_code == 3
    result = runner.invoke(cli, ['density', str(model_file)])
    assert result.exit_code == 3
    result = runner.invoke(cli, ['density', str(tmp_path / 'missing.npz'), '--profile', 'v1'])
    assert result.exit_code == 3


@pytest.mark.parametrize('text', ['0,0,0,0,0\n2.2,-0.2,2.2,-0.2,2.2\n',
                                  'v1,v2,v3,v4,v5\n0,0,0,0,0\n2.2,-0.2,2.2,-0.2,2.2\n'])
def test_density_v_file(cli, runner, model_file, tmp_path, text):
    v_file = tmp_path / 'v.csv'
    v_file.write_text(text)
    result = runner.invoke(cli, ['density', str(model_file), '--v-file', str(v_file),
                                 '--points', '5'])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert frame.groupby('v_id').size().tolist() == [5, 5]

    expected = runner.invoke(cli, ['density', str(model_file), '--v', '0,0,0,0,0',
                                   '--profile', 'v1', '--points', '5'])
    assert result.stdout == expected.stdout


def _sweep_config(tmp_path):
    path = tmp_path / 'sweep.json'
    path.write_text(json.dumps({'methods': ['rr'], 'variants': ['dr', 'pi'], 'scenarios': ['a'],
                                'n_list': [100, 200], 'seeds': [0], 'threads': 1}))
    return str(path)


def test_sweep_and_report(cli, runner, tmp_path):
    out = tmp_path / 'sweep.csv'
    result = runner.invoke(cli, ['sweep', '--config', _sweep_config(tmp_path), '--out', str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    assert len(frame) == 4 and (frame['status'] == 'ok').all()

    filtered = tmp_path / 'pi.csv'
    result = runner.invoke(cli, ['sweep', '--config', _sweep_config(tmp_path),
                                 '--filter', 'variant=pi', '--out', str(filtered)])
    assert result.exit_code == 0
    assert set(pd.read_csv(filtered)['variant']) == {'pi'}

    summary = tmp_path / 'summary.csv'
    result = runner.invoke(cli, ['report', str(out), '--out', str(summary)])
    assert result.exit_code == 0, result.output
    assert 'median_mse' in result.stdout
    assert len(pd.read_csv(summary)) == 4
    assert (tmp_path / 'summary.slopes.csv').exists()


def test_sweep_filters_everything_away(cli, runner, tmp_path):
    result = runner.invoke(cli, ['sweep', '--config', _sweep_config(tmp_path),
                                 '--filter', 'method=nk', '--out', str(tmp_path / 's.csv')])
    assert result.exit_code == 4
    result = runner.invoke(cli, ['sweep', '--filter', 'method', '--out', str(tmp_path / 's.csv')])
    assert result.exit_code == 4


def test_sweep_with_every_cell_failing(cli, runner, tmp_path, monkeypatch):
    def explode(*args, **kwargs):
        raise NumericError('non-finite training loss at epoch 0', epoch=0)

    monkeypatch.setattr('ccme.synthbench.sweep.fit_ccme', explode)
    out = tmp_path / 'sweep.csv'
    result = runner.invoke(cli, ['sweep', '--config', _sweep_config(tmp_path), '--threads', '1',
                                 '--out', str(out)])
    assert result.exit_code == 5
    frame = pd.read_csv(out)
    assert (frame['status'] == 'failed').all()
    assert frame['reason'].str.contains('epoch 0').all()


def test_report_power_law(cli, runner, tmp_path):
    path = tmp_path / 'sweep.csv'
    ns = [100, 200, 400, 800]
    pd.DataFrame({'method': 'nk', 'variant': 'ipw', 'scenario': 'b', 'n': ns, 'seed': 0,
                  'mse': [3.0 / n for n in ns], 'status': 'ok'}).to_csv(path, index=False)
    out = tmp_path / 'summary.csv'
    result = runner.invoke(cli, ['report', str(path), '--out', str(out)])
    assert result.exit_code == 0
    slopes = pd.read_csv(tmp_path / 'summary.slopes.csv')
    assert slopes['slope'].iloc[0] == pytest.approx(-1.0)
    assert '0 failed rows excluded' in result.output


def test_report_rejects_malformed_csv(cli, runner, tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('method,n\nrr,x\n')
    assert runner.invoke(cli, ['report', str(path)]).exit_code == 3


def test_profiles_command(cli, runner, tmp_path):
    out = tmp_path / 'profiles.csv'
    result = runner.invoke(cli, ['profiles', '--runs', '2', '--n', '100', '--profile', 'v1',
                                 '--threads', '1', '--out', str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    assert set(frame['profile']) == {'v1'}
    assert len(frame) == TestingConfig.EVAL_GRID_SIZE


def test_print_config_round_trip(cli, runner, tmp_path):
    result = runner.invoke(cli, ['simulate', '--n', '321', '--method', 'NK', '--print-config'])
    assert result.exit_code == 0
    dumped = json.loads(result.stdout)
    assert dumped['n'] == 321 and dumped['method'] == 'nk'
    assert dumped['df_epochs'] == list(TestingConfig.DF_EPOCHS)

    path = tmp_path / 'resolved.json'
    path.write_text(result.stdout)
    again = runner.invoke(cli, ['simulate', '--config', str(path), '--print-config'])
    assert json.loads(again.stdout) == dumped
