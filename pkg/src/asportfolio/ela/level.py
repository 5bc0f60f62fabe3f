"""Level-set features: LDA / QDA cross-validated error on quantile labels.

Labels depend on the objective values only through their order, so every
feature here is exactly invariant to f -> a f + c (a > 0). Folds are dealt
from a canonical ordering of the rows, which makes row shuffles matter only
through rounding inside the fits.
"""

import numpy as np

from .._kernels import discriminant_cv
from .vector import FeatureVector

QUANTILES = (10, 25, 50)  # percent
N_FOLDS = 10
MIN_CLASS = 10


def quantile_count(pct, s):
    """ceil(pct / 100 * s) in integer arithmetic."""
    return -(-int(pct) * int(s) // 100)


def quantile_labels(y, pct):
    """1 for the lowest ceil(q s) values (ties with the threshold included)."""
    y = np.asarray(y, dtype=float)
    k = quantile_count(pct, y.size)
    thr = np.sort(y)[max(k, 1) - 1]
    return (y <= thr).astype(np.int64)


def canonical_order(X, y):
    """Row order by objective value, ties broken by the coordinates."""
    keys = [X[:, j] for j in range(X.shape[1] - 1, -1, -1)] + [y]
    return np.lexsort(keys)


def stratified_folds(labels, order, n_folds=N_FOLDS):
    """Fold id per row: members of each class are dealt round-robin in ``order``."""
    fold = np.empty(labels.size, dtype=np.int64)
    for c in (0, 1):
        rows = order[labels[order] == c]
        fold[rows] = np.arange(rows.size) % n_folds
    return fold


def cv_errors(X, lab, fold, n_folds=N_FOLDS):
    """(mmce_lda, mmce_qda); an entry is None when a covariance was singular."""
    lda, qda, lda_ok, qda_ok = discriminant_cv(
        np.ascontiguousarray(X, dtype=float),
        np.ascontiguousarray(lab, dtype=np.int64),
        np.ascontiguousarray(fold, dtype=np.int64),
        n_folds,
    )
    return (float(lda) if lda_ok else None), (float(qda) if qda_ok else None)


def feat_level(sample, quantiles=QUANTILES) -> FeatureVector:
    X = np.asarray(sample.points, dtype=float)
    y = np.asarray(sample.values, dtype=float)
    pairs = []
    order = canonical_order(X, y)
    for pct in quantiles:
        lda = qda = ratio = None
        lab = quantile_labels(y, pct)
        n1 = int(lab.sum())
        if y.size >= 20 and min(n1, y.size - n1) >= MIN_CLASS:
            fold = stratified_folds(lab, order)
            lda, qda = cv_errors(X, lab, fold)
            if lda is not None and qda:
                ratio = lda / qda
        pairs += [(f"mmce_lda_{pct}", lda), (f"mmce_qda_{pct}", qda), (f"lda_qda_{pct}", ratio)]
    return FeatureVector.from_class("ela_level", pairs)
