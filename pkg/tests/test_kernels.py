"""numba kernels against their pure-numpy twins (ASPORTFOLIO_DISABLE_NUMBA path)."""

import numpy as np
import pytest

from asportfolio import _kernels as K
from asportfolio.ela.level import quantile_labels, stratified_folds, canonical_order


def test_registry_complete():
    assert set(K.IMPLEMENTATIONS) == {"distances", "nearest_better", "nn_tour", "build_tree",
                                      "predict_forest", "discriminant_cv"}


@pytest.mark.parametrize("seed", range(5))
def test_distances(seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-5, 5, (40, 1 + seed * 2))
    nb, npy = K.IMPLEMENTATIONS["distances"]
    # numpy may sum the coordinates pairwise; agreement to rounding
    assert np.allclose(nb(X), npy(X), rtol=1e-14, atol=0)
    assert np.array_equal(nb(X), nb(X).T)


@pytest.mark.parametrize("seed", range(5))
def test_nearest_better_and_tour(seed):
    rng = np.random.default_rng(seed)
    X = np.round(rng.uniform(-5, 5, (30, 2)), 1)  # rounding creates distance ties
    f = np.round(rng.standard_normal(30), 1)  # and value ties
    D = K._distances_nb(X)
    for a, b in zip(K._nearest_better_nb(D, f), K._nearest_better_np(D, f)):
        assert np.array_equal(a, b)
    assert np.array_equal(K._nn_tour_nb(D), K._nn_tour_np(D))


def _tree_case(seed, n=80, d=12):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    X[:, 3] = 1.0  # constant column
    X[:, 5] = np.round(X[:, 5])  # heavy ties
    y = X[:, 0] ** 2 + np.sin(X[:, 1]) + 0.1 * rng.normal(size=n)
    return X, y, K.column_order(X)


@pytest.mark.parametrize("seed", range(4))
def test_build_tree_identical(seed):
    X, y, order = _tree_case(seed)
    rng = np.random.default_rng(100 + seed)
    trees = []
    for _ in range(10):
        rows = rng.integers(0, X.shape[0], X.shape[0])
        s = int(rng.integers(0, 2**63 - 1))
        for min_leaf in (1, 2, 5):
            a = K._build_tree_nb(X, y, order, rows, s, 4, min_leaf)
            b = K._build_tree_np(X, y, order, rows, s, 4, min_leaf)
            assert a[5] == b[5]
            for u, v in zip(a[:5], b[:5]):
                assert np.array_equal(u[: a[5]], v[: a[5]])
            trees.append(a)
    # pack and predict through both twins
    offsets = np.cumsum([0] + [t[5] for t in trees]).astype(np.int64)
    arrays = [np.concatenate([t[i][: t[5]] for t in trees]) for i in range(5)]
    p1 = K._predict_forest_nb(X, *arrays, offsets)
    p2 = K._predict_forest_np(X, *arrays, offsets)
    assert np.array_equal(p1, p2)


def test_tree_leaf_sizes_and_values():
    X, y, order = _tree_case(9)
    rows = np.arange(X.shape[0])
    feat, thr, left, right, value, n = K._build_tree_nb(X, y, order, rows, 5, 12, 2)
    # route every training row; each leaf holds >= 2 rows and predicts their mean
    leaf_of = []
    for x in X:
        k = 0
        while feat[k] >= 0:
            k = left[k] if x[feat[k]] <= thr[k] else right[k]
        leaf_of.append(k)
    leaf_of = np.array(leaf_of)
    for k in np.unique(leaf_of):
        members = y[leaf_of == k]
        assert members.size >= 2
        assert value[k] == pytest.approx(members.mean(), rel=1e-12, abs=1e-12)
    assert feat[0] != 3  # the constant column is never split on


@pytest.mark.parametrize("seed", range(6))
def test_discriminant_cv_identical(seed):
    rng = np.random.default_rng(seed)
    n = 60
    X = rng.normal(size=(n, 1 + seed % 3))
    y = X[:, 0] + 0.5 * rng.normal(size=n)
    lab = quantile_labels(y, 25)
    folds = stratified_folds(lab, canonical_order(X, y))
    a = K._discriminant_cv_nb(X, lab.astype(np.int64), folds, 10)
    b = K._discriminant_cv_np(X, lab.astype(np.int64), folds, 10)
    assert a == b


def test_discriminant_cv_singular_flags():
    X = np.zeros((40, 2))
    X[:, 0] = np.arange(40.0)  # second column constant -> singular covariances
    lab = (np.arange(40) < 10).astype(np.int64)
    folds = np.arange(40) % 10
    a = K._discriminant_cv_nb(X, lab, folds, 10)
    b = K._discriminant_cv_np(X, lab, folds, 10)
    assert a[2:] == b[2:] == (False, False)
