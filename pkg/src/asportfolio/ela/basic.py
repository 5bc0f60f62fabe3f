"""Basic sample descriptors."""

import numpy as np

from ..suite import LOWER, UPPER
from .vector import FeatureVector


def feat_basic(sample, instance_meta=None) -> FeatureVector:
    y = np.asarray(sample.values, dtype=float)
    dim = sample.points.shape[1]
    lo = hi = ratio = None
    if y.size:
        lo, hi = y.min(), y.max()
        if hi != 0:
            ratio = abs(lo) / abs(hi)
    pairs = [
        ("dim", dim),
        ("observations", y.size),
        ("lower_min", LOWER),
        ("upper_max", UPPER),
        ("objective_min", lo),
        ("objective_max", hi),
        ("best_worst_ratio", ratio),
    ]
    return FeatureVector.from_class("basic", pairs)
