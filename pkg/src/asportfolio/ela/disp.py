"""Dispersion features: spread of the best points against the whole sample."""

import numpy as np

from .._kernels import distances
from .level import quantile_count
from .vector import FeatureVector

QUANTILES = (2, 5, 10, 25)  # percent


def _pair_stats(D, idx):
    sub = D[np.ix_(idx, idx)]
    d = sub[np.triu_indices(len(idx), k=1)]
    return d.mean(), np.median(d)


def feat_disp(sample, quantiles=QUANTILES, D=None) -> FeatureVector:
    X = np.asarray(sample.points, dtype=float)
    y = np.asarray(sample.values, dtype=float)
    s = y.size
    pairs = []
    ok = s >= 20
    if ok:
        if D is None:
            D = distances(np.ascontiguousarray(X))
        everyone = np.arange(s)
        mean_all, med_all = _pair_stats(D, everyone)
        order = np.argsort(y, kind="stable")
        constant = bool(np.all(y == y[0]))
    for pct in quantiles:
        vals = (None,) * 4
        k = quantile_count(pct, s)
        if ok and k >= 2:
            # all-tied values carry no ranking; the whole sample is the subset
            idx = everyone if constant else np.sort(order[:k])
            m, md = _pair_stats(D, idx)
            vals = (m / mean_all, md / med_all, m - mean_all, md - med_all)
        tag = f"{pct:02d}"
        pairs += [
            (f"ratio_mean_{tag}", vals[0]),
            (f"ratio_median_{tag}", vals[1]),
            (f"diff_mean_{tag}", vals[2]),
            (f"diff_median_{tag}", vals[3]),
        ]
    return FeatureVector.from_class("disp", pairs)
