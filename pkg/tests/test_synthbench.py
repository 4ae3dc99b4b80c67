import numpy as np
import pandas as pd
import pytest
from scipy.integrate import trapezoid

from ccme.errors import (ConfigurationError, DataFormatError, DegenerateDataError,
                         InvalidArgumentError, NumericError)
from ccme.synthbench import (PROFILE_COLUMNS, PROFILES, DgpConfig, GroundTruth, SweepCell,
                             build_cells, generate, loglog_slope, mse, read_sweep, records_frame,
                             run_cell, run_profiles, run_sweep, summarize, true_density,
                             write_frame)
from ccme.synthbench.sweep import evaluation_design


@pytest.fixture(scope='module')
def large_draw():
    return generate(DgpConfig(n=20000, seed=11))


def test_dgp_shapes_and_determinism():
    dataset, latent = generate(DgpConfig(n=50, seed=2))
    again, _ = generate(DgpConfig(n=50, seed=2))
    np.testing.assert_array_equal(dataset.X, again.X)
    np.testing.assert_array_equal(dataset.Y, again.Y)
    assert dataset.X.shape == (50, 10) and dataset.Y.shape == (50, 1)
    assert dataset.v_columns == (0, 1, 2, 3, 4)
    p = latent.propensity
    assert np.all(np.isclose(p, 0.1) | np.isclose(p, 0.9))


def test_dgp_observed_outcomes(large_draw):
    dataset, latent = large_draw
    treated = dataset.A == 1
    np.testing.assert_array_equal(dataset.Y[treated, 0], latent.Y1[treated])
    np.testing.assert_array_equal(dataset.Y[~treated, 0], latent.Y0[~treated])
    assert set(np.unique(latent.S)) == {0.0, 15.0}


def test_dgp_treated_fraction(large_draw):
    dataset, latent = large_draw
    assert dataset.A.mean() == pytest.approx(0.2685, abs=0.015)
    assert latent.propensity.mean() == pytest.approx(0.2685, abs=0.015)


def test_truth_constants():
    truth = GroundTruth()
    assert truth.tail_mean == pytest.approx(3.5)
    assert truth.tail_variance == pytest.approx(9.55)
    v1 = PROFILES['v1']
    assert truth.mixture_weight(v1)[0] == pytest.approx(0.7503, abs=1e-4)
    assert truth.mean0(v1)[0] == pytest.approx(13.66)
    assert truth.mean1(v1)[0] == pytest.approx(28.66)
    assert truth.variance(v1)[0] == pytest.approx(11.4544)
    assert truth.mixture_weight(PROFILES['v2'])[0] == pytest.approx(0.475, abs=1e-3)


def test_truth_density_integrates_to_one():
    y = np.linspace(-40, 80, 24001)
    V = np.array([PROFILES['v1'], PROFILES['v2'], np.zeros(5)])
    masses = trapezoid(GroundTruth().density(V, y), y, axis=0)
    np.testing.assert_allclose(masses, 1.0, atol=1e-8)


def test_true_density_scalar_and_vector():
    v1 = PROFILES['v1']
    value = true_density(v1, 20.0)
    assert isinstance(value, float)
    np.testing.assert_allclose(true_density(v1, [20.0, 21.0])[0], value)
    assert GroundTruth().cdf(v1, 200.0) == pytest.approx(1.0)


def test_mse_identities():
    truth = GroundTruth()
    V, y = np.zeros((3, 5)), np.linspace(0, 10, 6)
    assert mse(truth.density, truth, V, y) == 0.0
    assert mse(lambda V, y: truth.density(V, y) + 0.1, truth, V, y) == pytest.approx(0.01)


def test_loglog_slope():
    ns = np.array([100, 200, 400, 800])
    assert loglog_slope(ns, 3.0 * ns ** -0.5) == pytest.approx(-0.5)
    with pytest.raises(InvalidArgumentError):
        loglog_slope([100, 200], [1.0, 0.5])
    with pytest.raises(InvalidArgumentError):
        loglog_slope([100, 200, 400], [1.0, 0.0, 0.5])


def test_build_cells(testing_config):
    config = testing_config.update(dict(methods=('rr', 'nk'), variants=('dr', 'pi'),
                                        scenarios=('a',), n_list=(200, 500), seeds=(0, 1),
                                        rr_max_n=300))
    cells = build_cells(config)
    assert len(cells) == 2 * 2 * 2 + 2 * 1 * 2
    assert not [c for c in cells if c.method == 'rr' and c.n == 500]
    assert len({c.cell_id for c in cells}) == len(cells)

    filtered = build_cells(config.update({'filters': {'variant': 'pi', 'method': 'NK'}}))
    assert {(c.method, c.variant) for c in filtered} == {('nk', 'pi')}
    with pytest.raises(ConfigurationError):
        build_cells(config.update({'filters': {'lambda_1': '2'}}))


def test_evaluation_design(testing_config, large_draw):
    test_v, y_grid = evaluation_design(testing_config, 0, large_draw[0])
    assert test_v.shape == (testing_config.test_points, 5)
    assert len(y_grid) == testing_config.eval_grid_size
    assert y_grid[0] == pytest.approx(large_draw[0].Y.min() - 2.0)


def test_run_cell_is_deterministic(testing_config):
    cell = SweepCell('rr', 'dr', 'a', 200, 3)
    a, b = run_cell(cell, testing_config), run_cell(cell, testing_config)
    assert a['status'] == 'ok' and np.isfinite(a['mse']) and a['mse'] > 0
    assert a['mse'] == b['mse']
    assert list(records_frame([a]).columns) == [
        'method', 'variant', 'scenario', 'n', 'seed', 'mse', 'seconds', 'status', 'reason']


def test_failed_cells_are_recorded(testing_config, monkeypatch):
    def explode(*args, **kwargs):
        raise NumericError('matrix not positive definite at pivot 3', pivot=3)

    monkeypatch.setattr('ccme.synthbench.sweep.fit_ccme', explode)
    cells = [SweepCell('rr', 'dr', 'a', 50, 0), SweepCell('rr', 'pi', 'a', 50, 0)]
    records = run_sweep(testing_config, cells=cells, n_jobs=1)
    assert [r['status'] for r in records] == ['failed', 'failed']
    assert 'pivot 3' in records[0]['reason']
    assert np.isnan(records[0]['mse'])


def _fake_sweep():
    rows = []
    for n in (100, 200, 400):
        for seed, factor in enumerate((0.9, 1.0, 1.1)):
            rows.append(dict(method='rr', variant='dr', scenario='a', n=n, seed=seed,
                             mse=factor * 4.0 / n, seconds=1.0, status='ok', reason=''))
    rows.append(dict(method='rr', variant='dr', scenario='a', n=400, seed=9, mse=np.nan,
                     seconds=1.0, status='failed', reason='pivot'))
    return records_frame(rows)


def test_summarize():
    summary, slopes, n_failed = summarize(_fake_sweep())
    assert n_failed == 1
    assert summary['n'].tolist() == [100, 200, 400]
    np.testing.assert_allclose(summary['median_mse'], [0.04, 0.02, 0.01])
    assert summary['n_ok'].tolist() == [3, 3, 3]
    assert slopes['slope'].iloc[0] == pytest.approx(-1.0)
    assert slopes['points'].iloc[0] == 3


def test_sweep_file_round_trip(tmp_path):
    path = tmp_path / 'sweep.csv'
    write_frame(_fake_sweep(), path)
    frame = read_sweep(path)
    assert frame['status'].tolist().count('failed') == 1
    assert summarize(frame)[2] == 1


def test_read_sweep_errors(tmp_path):
    path = tmp_path / 'short.csv'
    pd.DataFrame({'method': ['rr'], 'n': [5]}).to_csv(path, index=False)
    with pytest.raises(DataFormatError):
        read_sweep(path)
    with pytest.raises(DataFormatError):
        read_sweep(tmp_path / 'missing.csv')

    legacy = tmp_path / 'legacy.csv'
    pd.DataFrame({'method': ['rr', 'rr'], 'variant': ['dr', 'dr'], 'scenario': ['a', 'a'],
                  'n': [5, 5], 'seed': [0, 1], 'mse': [0.1, np.nan]}).to_csv(legacy, index=False)
    assert read_sweep(legacy)['status'].tolist() == ['ok', 'failed']


def test_run_profiles(testing_config):
    frame, n_failed = run_profiles(testing_config, runs=(0, 1), n=100, n_jobs=1)
    assert n_failed == 0
    assert list(frame.columns) == PROFILE_COLUMNS
    assert len(frame) == 2 * testing_config.eval_grid_size
    assert (frame['q05'] <= frame['median']).all() and (frame['median'] <= frame['q95']).all()
    assert (frame['q25'] <= frame['q75']).all()


def test_run_profiles_errors(testing_config, monkeypatch):
    with pytest.raises(InvalidArgumentError):
        run_profiles(testing_config, runs=(0,), n=100, names=('v3',), n_jobs=1)

    def explode(*args, **kwargs):
        raise DegenerateDataError('no treated rows')

    monkeypatch.setattr('ccme.synthbench.profiles.fit_ccme', explode)
    with pytest.raises(DegenerateDataError):
        run_profiles(testing_config, runs=(0, 1), n=100, n_jobs=1)
