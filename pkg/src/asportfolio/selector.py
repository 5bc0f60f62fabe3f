"""Regression-based algorithm selection: one forest per portfolio member."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._kernels import column_order
from ._seeding import derive_seed
from .forest import RandomForest

ERROR_FLOOR = 1e-12
TARGETS = ("log10", "raw")


class InsufficientDataError(ValueError):
    pass


def transform_target(errors, kind="log10"):
    errors = np.asarray(errors, dtype=float)
    if kind == "log10":
        return np.log10(errors + ERROR_FLOOR)
    if kind == "raw":
        return errors
    raise ValueError(f"target must be one of {TARGETS}")


def feature_matrix(rows, names):
    """Stack FeatureVectors into a float matrix with NaN for missing."""
    return np.array([fv.to_array(names) for fv in rows], dtype=float).reshape(len(rows), len(names))


def imputation_means(X, names):
    """Per-column means over non-missing entries; all-missing columns are dropped.

    Returns (kept names, their means).
    """
    present = ~np.isnan(X)
    keep = present.any(axis=0)
    sums = np.where(present, X, 0.0).sum(axis=0)
    means = sums[keep] / present.sum(axis=0)[keep]
    return [n for n, k in zip(names, keep) if k], means


def impute(features, means, names) -> np.ndarray:
    """Dense vector in ``names`` order with missing entries set to ``means``."""
    v = features.to_array(names)
    return np.where(np.isnan(v), means, v)


@dataclass
class TrainedSelector:
    portfolio: object
    models: dict
    feature_names: list
    imputation_means: np.ndarray
    target_transform: str = "log10"
    dropped_features: list = field(default_factory=list)
    train_rmse: dict = field(default_factory=dict)

    @property
    def members(self):
        return sorted(self.models)

    def predict(self, features) -> dict:
        x = impute(features, self.imputation_means, self.feature_names)[None, :]
        return {m: float(self.models[m].predict(x)[0]) for m in self.members}

    def impute_matrix(self, X, names) -> np.ndarray:
        """Rows of X (columns ``names``, NaN = missing) restricted and imputed."""
        idx = [names.index(n) for n in self.feature_names]
        Xk = np.asarray(X, dtype=float)[:, idx]
        return np.where(np.isnan(Xk), self.imputation_means, Xk)

    def predict_matrix(self, X_imputed) -> np.ndarray:
        """(rows, k) predictions, columns in ``members`` order."""
        return np.column_stack([self.models[m].predict(X_imputed) for m in self.members])


def model_seed(seed, member_id) -> int:
    """Seed of one member's forest; independent of the rest of the portfolio."""
    return derive_seed(seed, "model", member_id)


def train_selector(portfolio, rows, errors, seed, names=None, target="log10",
                   forest_kwargs=None, model_cache=None) -> TrainedSelector:  # fmt: skip
    """Fit one forest per member on log10(error + 1e-12).

    ``rows`` are FeatureVectors; ``errors[member]`` is a sequence aligned with
    ``rows``. Imputation means come from ``rows`` only.
    """
    rows = list(rows)
    names = list(names) if names is not None else (rows[0].names if rows else [])
    return train_selector_matrix(portfolio, feature_matrix(rows, names), names, errors, seed,
                                 target, forest_kwargs, model_cache)  # fmt: skip


def train_selector_matrix(portfolio, X, names, errors, seed, target="log10",
                          forest_kwargs=None, model_cache=None) -> TrainedSelector:  # fmt: skip
    """``train_selector`` on a feature matrix with NaN marking missing values.

    ``model_cache`` (a dict) lets several portfolios that share a member and
    a training set reuse the same fitted forest.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 5:
        raise InsufficientDataError(f"need at least 5 training rows, got {X.shape[0]}")
    names = list(names)
    kept, means = imputation_means(X, names)
    keep = set(kept)
    dropped = [n for n in names if n not in keep]
    Xk = X[:, [i for i, n in enumerate(names) if n in keep]]
    Xk = np.where(np.isnan(Xk), means, Xk)
    order = None
    models, rmse = {}, {}
    for m in sorted(portfolio.members):
        e = np.asarray(errors[m], dtype=float)
        if e.size != X.shape[0] or np.isnan(e).any():
            raise InsufficientDataError(f"member {m!r}: errors missing for some training rows")
        key = (m, target)
        if model_cache is not None and key in model_cache:
            models[m], rmse[m] = model_cache[key]
            continue
        if order is None:
            order = column_order(Xk)
        y = transform_target(e, target)
        forest = RandomForest(**(forest_kwargs or {})).fit(Xk, y, model_seed(seed, m), order)
        models[m] = forest
        rmse[m] = float(np.sqrt(np.mean((forest.predict(Xk) - y) ** 2)))
        if model_cache is not None:
            model_cache[key] = (forest, rmse[m])
    return TrainedSelector(portfolio, models, kept, means, target, dropped, rmse)


def argmin_member(predictions: dict) -> str:
    """Smallest prediction; ties go to the lexicographically smallest id."""
    return min(sorted(predictions), key=lambda m: predictions[m])


def select(selector: TrainedSelector, features) -> str:
    return argmin_member(selector.predict(features))


def write_selector_summary(path, selector: TrainedSelector) -> None:
    """Diagnostics: training RMSE per model and split counts per feature."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "name", "member", "value"])
        for m in selector.members:
            w.writerow(["train_rmse", "", m, repr(selector.train_rmse[m])])
        for m in selector.members:
            usage = selector.models[m].feature_usage()
            for name, c in zip(selector.feature_names, usage):
                w.writerow(["feature_usage", name, m, int(c)])
        for name in selector.dropped_features:
            w.writerow(["dropped", name, "", ""])
