"""Nearest-better clustering features."""

import numpy as np
from scipy.stats import rankdata

from .._kernels import distances, nearest_better
from .vector import FeatureVector

NAMES = (
    "nn_nb.mean_ratio",
    "nn_nb.sd_ratio",
    "nn_nb.cor",
    "dist_ratio.coeff_var",
    "nb_fitness.cor",
)


def _pearson(a, b):
    a = a - a.mean()
    b = b - b.mean()
    den = np.sqrt(np.sum(a * a) * np.sum(b * b))
    return float(np.sum(a * b) / den) if den > 0 else None


def nbc_distances(X, y, D=None):
    """(nn, nb, nb_index) per row; the best point's nb is its largest distance."""
    if D is None:
        D = distances(np.ascontiguousarray(X, dtype=float))
    return nearest_better(D, np.ascontiguousarray(y, dtype=float))


def feat_nbc(sample, D=None) -> FeatureVector:
    X = np.asarray(sample.points, dtype=float)
    y = np.asarray(sample.values, dtype=float)
    out = dict.fromkeys(NAMES)
    if y.size >= 5 and not np.all(y == y[0]):
        nn, nb, nb_idx = nbc_distances(X, y, D)
        mean_nn = nn.mean()
        sd_nn = nn.std(ddof=1)
        out["nn_nb.mean_ratio"] = nb.mean() / mean_nn if mean_nn > 0 else None
        out["nn_nb.sd_ratio"] = nb.std(ddof=1) / sd_nn if sd_nn > 0 else None
        out["nn_nb.cor"] = _pearson(nn, nb)
        if np.all(nn > 0):
            q = nb / nn
            out["dist_ratio.coeff_var"] = q.std(ddof=1) / q.mean()
        indeg = np.bincount(nb_idx[nb_idx >= 0], minlength=y.size).astype(float)
        out["nb_fitness.cor"] = _pearson(rankdata(y), rankdata(indeg))
    return FeatureVector.from_class("nbc", [(k, out[k]) for k in NAMES])
