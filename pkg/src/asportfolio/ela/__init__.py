"""Exploratory landscape analysis features computed from a Sample."""

import numpy as np

from .._kernels import distances
from .basic import feat_basic
from .disp import feat_disp
from .distr import feat_distr
from .ic import feat_ic
from .level import feat_level
from .meta import feat_meta
from .nbc import feat_nbc
from .pca import feat_pca
from .vector import (
    KEY_COLUMNS,
    MISSING,
    FeatureVector,
    read_feature_csv,
    write_feature_csv,
)

FEATURE_CLASSES = ("ela_distr", "ela_level", "ela_meta", "nbc", "disp", "ic", "pca", "basic")
_USES_DISTANCES = ("nbc", "disp", "ic")


def _run(name, sample, seed, D):
    if name == "ela_distr":
        return feat_distr(sample)
    if name == "ela_level":
        return feat_level(sample)
    if name == "ela_meta":
        return feat_meta(sample)
    if name == "nbc":
        return feat_nbc(sample, D=D)
    if name == "disp":
        return feat_disp(sample, D=D)
    if name == "ic":
        return feat_ic(sample, seed, D=D)
    if name == "pca":
        return feat_pca(sample)
    return feat_basic(sample)


# one nominal sample per class gives the full, stable name list
_EMPTY = None


def _blank(name):
    global _EMPTY
    if _EMPTY is None:
        from ..sample import Sample

        _EMPTY = Sample(np.zeros((1, 1)), np.zeros(1), 1)
    fv = _run(name, _EMPTY, 0, np.zeros((1, 1)))
    return FeatureVector.from_class(name, [(k.split(".", 1)[1], None) for k in fv.names])


def feature_names(enabled_classes=FEATURE_CLASSES):
    return [k for c in enabled_classes for k in _blank(c).names]


def compute_features(sample, enabled_classes=FEATURE_CLASSES, seed=0) -> FeatureVector:
    """Concatenate the enabled feature classes.

    Never raises on degenerate data: a class that cannot be computed yields
    missing entries and status 'missing'.
    """
    unknown = set(enabled_classes) - set(FEATURE_CLASSES)
    if unknown:
        raise ValueError(f"unknown feature classes {sorted(unknown)}")
    if sample.size < 1:
        raise ValueError("empty sample")
    D = None
    if any(c in enabled_classes for c in _USES_DISTANCES):
        D = distances(np.ascontiguousarray(sample.points, dtype=float))
    parts = []
    for name in FEATURE_CLASSES:
        if name not in enabled_classes:
            continue
        try:
            with np.errstate(all="ignore"):
                parts.append(_run(name, sample, seed, D))
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError, FloatingPointError):
            parts.append(_blank(name))
    return FeatureVector.concat(parts)


__all__ = [
    "FEATURE_CLASSES",
    "KEY_COLUMNS",
    "MISSING",
    "FeatureVector",
    "compute_features",
    "feature_names",
    "feat_basic",
    "feat_disp",
    "feat_distr",
    "feat_ic",
    "feat_level",
    "feat_meta",
    "feat_nbc",
    "feat_pca",
    "read_feature_csv",
    "write_feature_csv",
]
