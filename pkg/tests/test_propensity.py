import numpy as np
import pytest

from ccme.errors import DegenerateDataError, InvalidArgumentError
from ccme.propensity import (ForestPropensity, LogisticPropensity, OraclePropensity,
                             candidate_count, clipped_fraction, fit_forest, fit_logistic,
                             logistic_loss, predict_propensity, synthetic_propensity)
from ccme.synthbench import DgpConfig, generate


def test_logistic_gradient_matches_finite_differences(rng, numeric_grad, rel_error):
    X = rng.normal(size=(30, 4))
    A = (rng.random(30) < 0.4).astype(float)
    coef, intercept = rng.normal(size=4), 0.3
    _, grad_coef, grad_intercept = logistic_loss(coef, intercept, X, A)

    expected = numeric_grad(lambda c: logistic_loss(c, intercept, X, A)[0], coef)
    assert rel_error(grad_coef, expected) < 1e-4
    expected = numeric_grad(lambda b: logistic_loss(coef, float(b[0]), X, A)[0], [intercept])
    assert rel_error(np.array([grad_intercept]), expected) < 1e-4


def test_logistic_balanced_labels(rng):
    x = rng.normal(size=(50, 3))
    X = np.vstack([x, x])
    A = np.r_[np.ones(50), np.zeros(50)]
    model = fit_logistic(X, A)
    assert model.intercept == pytest.approx(0.0, abs=0.02)
    np.testing.assert_allclose(model.predict(X), 0.5, atol=0.02)


def test_logistic_intercept_only_recovers_base_rate():
    X = np.zeros((100, 2))
    A = np.r_[np.ones(30), np.zeros(70)]
    model = fit_logistic(X, A)
    assert predict_propensity(model, np.zeros(2)) == pytest.approx(0.3, abs=0.02)


def test_logistic_separable_is_clipped():
    X = np.linspace(-2, 2, 40).reshape(-1, 1)
    A = (X[:, 0] > 0).astype(int)
    model = fit_logistic(X, A)
    assert predict_propensity(model, [50.0]) == 0.99
    assert predict_propensity(model, [-50.0]) == 0.01


def test_logistic_rejects_single_class():
    with pytest.raises(DegenerateDataError) as info:
        fit_logistic(np.ones((5, 2)), np.ones(5))
    assert info.value.exit_code == 4


def test_logistic_is_deterministic(rng):
    X = rng.normal(size=(40, 2))
    A = (X[:, 0] + rng.normal(size=40) > 0).astype(int)
    a, b = fit_logistic(X, A, epochs=200), fit_logistic(X, A, epochs=200)
    np.testing.assert_array_equal(a.coef, b.coef)
    assert a.intercept == b.intercept


def test_widening_clip_keeps_interior_predictions(rng):
    X = rng.normal(scale=3.0, size=(200, 2))
    narrow = LogisticPropensity(coef=np.array([2.0, -1.0]), intercept=0.5, clip=(0.1, 0.9))
    wide = LogisticPropensity(coef=np.array([2.0, -1.0]), intercept=0.5, clip=(0.01, 0.99))
    p_narrow, p_wide = narrow.predict(X), wide.predict(X)
    interior = (p_narrow > 0.1) & (p_narrow < 0.9)
    assert interior.any()
    np.testing.assert_array_equal(p_narrow[interior], p_wide[interior])
    assert p_wide.min() >= 0.01 and p_wide.max() <= 0.99


def test_bad_clip_bounds():
    with pytest.raises(InvalidArgumentError):
        fit_logistic(np.zeros((4, 1)), [0, 1, 0, 1], clip=(0.5, 0.4))


def _separable(n=40):
    X = np.linspace(-1, 1, n).reshape(-1, 1)
    return X, (X[:, 0] > 0).astype(int)


def test_forest_pure_leaves_are_clipped():
    X, A = _separable()
    forest = fit_forest(X, A, n_trees=20, max_depth=1, seed=0)
    assert isinstance(forest, ForestPropensity)
    np.testing.assert_array_equal(forest.predict(np.array([[-10.0], [10.0]])), [0.01, 0.99])
    assert all(tree.depth <= 1 for tree in forest.trees)


def test_forest_predictions_stay_in_range(rng):
    X = rng.normal(size=(200, 3))
    A = (rng.random(200) < synthetic_propensity(np.hstack([X, X]))).astype(int)
    forest = fit_forest(X, A, n_trees=10, seed=1, clip=(0.05, 0.95))
    p = forest.predict(rng.normal(scale=5.0, size=(500, 3)))
    assert p.min() >= 0.05 and p.max() <= 0.95


def test_forest_is_seeded(rng):
    X = rng.normal(size=(80, 4))
    A = (X[:, 0] > 0.2).astype(int)
    query = rng.normal(size=(30, 4))
    a = fit_forest(X, A, n_trees=8, seed=5).predict(query)
    b = fit_forest(X, A, n_trees=8, seed=5).predict(query)
    np.testing.assert_array_equal(a, b)


def test_forest_is_schedule_independent(rng):
    X = rng.normal(size=(80, 4))
    A = (X[:, 1] < 0).astype(int)
    query = rng.normal(size=(30, 4))
    serial = fit_forest(X, A, n_trees=6, seed=2, n_jobs=1).predict(query)
    parallel = fit_forest(X, A, n_trees=6, seed=2, n_jobs=2).predict(query)
    np.testing.assert_array_equal(serial, parallel)


def test_forest_ties_go_right():
    X = np.r_[np.zeros(10), np.ones(10)].reshape(-1, 1)
    A = np.r_[np.zeros(10), np.ones(10)].astype(int)
    forest = fit_forest(X, A, n_trees=5, max_depth=1, seed=0, clip=(0.001, 0.999))
    tree = forest.trees[0]
    assert tree.threshold == 1.0
    assert tree.predict(np.array([[1.0]]))[0] == 1.0


def test_forest_single_class_is_constant():
    X = np.arange(12, dtype=float).reshape(-1, 1)
    model = fit_forest(X, np.ones(12), seed=0)
    np.testing.assert_array_equal(model.predict(X), 0.99)


def test_forest_needs_ten_rows():
    with pytest.raises(InvalidArgumentError):
        fit_forest(np.zeros((9, 2)), np.r_[np.zeros(5), np.ones(4)])


def test_oracle_matches_the_synthetic_rule():
    oracle = OraclePropensity(function=synthetic_propensity, tag='synthetic')
    x = np.ones(10)
    x[5] = 2.0
    assert predict_propensity(oracle, x) == pytest.approx(0.9)
    x[5] = 0.0
    assert predict_propensity(oracle, x) == pytest.approx(0.1)


def test_predict_rejects_dimension_mismatch():
    model = LogisticPropensity(coef=np.zeros(2), intercept=0.0)
    with pytest.raises(InvalidArgumentError) as info:
        model.predict(np.zeros((3, 5)))
    assert info.value.exit_code == 3


def test_clipped_fraction():
    model = LogisticPropensity(coef=np.array([1.0]), intercept=0.0)
    X = np.array([[-100.0], [0.0], [0.0], [100.0]])
    assert clipped_fraction(model, X) == 0.5
    unclipped = OraclePropensity(function=lambda Z: np.ones(len(Z)), clip=None)
    assert clipped_fraction(unclipped, X) == 0.0


@pytest.mark.parametrize('max_features, expected', [('sqrt', 3), ('all', 10), (4, 4), (10, 10)])
def test_candidate_count(max_features, expected):
    assert candidate_count(max_features, 10) == expected


@pytest.mark.parametrize('max_features', [0, 11, 'half', 2.5, True])
def test_candidate_count_rejects_bad_values(max_features):
    with pytest.raises(InvalidArgumentError) as info:
        candidate_count(max_features, 10)
    assert info.value.exit_code == 3


def test_forest_with_all_features_finds_the_signal_column(rng):
    X = rng.normal(size=(40, 4))
    A = (X[:, 3] > 0).astype(float)
    forest = fit_forest(X, A, n_trees=10, max_depth=2, seed=0, max_features='all')
    np.testing.assert_allclose(forest.predict(np.array([[0, 0, 0, -5.0], [0, 0, 0, 5.0]])),
                               [0.01, 0.99])
    with pytest.raises(InvalidArgumentError):
        fit_forest(X, A, n_trees=2, max_features='half')


@pytest.mark.slow
def test_forest_recovers_synthetic_propensity():
    dataset, latent = generate(DgpConfig(n=20000, seed=0))

    def mae(max_features):
        forest = fit_forest(dataset.X, dataset.A, n_trees=100, max_depth=4, seed=0, n_jobs=-1,
                            max_features=max_features)
        return np.mean(np.abs(forest.predict(dataset.X) - latent.propensity))

    assert mae('all') < 0.05
    # sqrt(d) candidates per node rarely pair X1 with X6
    assert mae('sqrt') < 0.15
