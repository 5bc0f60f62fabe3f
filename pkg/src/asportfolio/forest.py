"""Bagged regression trees (random forest) on top of the tree kernels.

Defaults: 100 trees, bootstrap rows, ceil(d / 3) candidate features per
split where d counts only non-constant columns, variance-reduction splits at
midpoints, minimum leaf size 2, prediction = mean over trees.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import build_tree, column_order, predict_forest

N_TREES = 100
MIN_LEAF = 2


class RandomForest:
    def __init__(self, n_trees=N_TREES, min_leaf=MIN_LEAF, mtry=None):
        self.n_trees = int(n_trees)
        self.min_leaf = int(min_leaf)
        self.mtry = mtry
        self._constant = None
        self._arrays = None

    def fit(self, X, y, seed, order=None):
        """Fit on X (N x d, no NaN) and y. ``order`` may carry ``column_order(X)``."""
        X = np.ascontiguousarray(X, dtype=float)
        y = np.ascontiguousarray(y, dtype=float)
        N, d = X.shape
        if N != y.size or N < 5:
            raise ValueError(f"need at least 5 rows and len(y) == rows(X); got {N}, {y.size}")
        if np.isnan(X).any() or np.isnan(y).any():
            raise ValueError("X and y must not contain NaN")
        self.n_features_ = d
        if np.all(y == y[0]):
            self._constant = float(y[0])
            return self
        varying = int(np.sum(np.any(X != X[0], axis=0)))
        mtry = self.mtry or max(1, math.ceil(varying / 3))
        if order is None:
            order = column_order(X)
        rng = np.random.default_rng(seed)
        boots = rng.integers(0, N, size=(self.n_trees, N))
        seeds = rng.integers(0, 2**63 - 1, size=self.n_trees)
        parts = [build_tree(X, y, order, boots[t], int(seeds[t]), mtry, self.min_leaf)
                 for t in range(self.n_trees)]  # fmt: skip
        sizes = [p[5] for p in parts]
        self._arrays = tuple(np.concatenate([p[i][: p[5]] for p in parts]) for i in range(5))
        self._offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.mtry_ = mtry
        return self

    def predict(self, X) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=float)
        if self._constant is not None:
            return np.full(X.shape[0], self._constant)
        return predict_forest(X, *self._arrays, self._offsets)

    def feature_usage(self) -> np.ndarray:
        """Number of split nodes per feature across all trees."""
        counts = np.zeros(self.n_features_, dtype=np.int64)
        if self._arrays is not None:
            f = self._arrays[0]
            np.add.at(counts, f[f >= 0], 1)
        return counts

    @property
    def n_nodes(self) -> int:
        return 0 if self._arrays is None else int(self._offsets[-1])


def fit_regressor(X, y, seed, **kwargs) -> RandomForest:
    return RandomForest(**kwargs).fit(X, y, seed)
