"""Principal-component features of the design and of design plus objective."""

import numpy as np

from .vector import FeatureVector

THRESHOLD = 0.9
VARIANTS = ("cov_x", "cor_x", "cov_init", "cor_init")


def _spectrum(M, correlation):
    C = np.cov(M, rowvar=False)
    C = np.atleast_2d(C)
    if correlation:
        sd = np.sqrt(np.diag(C))
        if np.any(sd <= 0):
            return None
        C = C / np.outer(sd, sd)
    lam = np.clip(np.linalg.eigvalsh(C)[::-1], 0.0, None)
    total = lam.sum()
    return None if not total > 0 else lam / total


def explained(M, correlation):
    """(k*/D, first-component share) or (None, None)."""
    share = _spectrum(M, correlation)
    if share is None:
        return None, None
    # tolerate rounding in the cumulative sum right at the threshold
    k = int(np.argmax(np.cumsum(share) >= THRESHOLD - 1e-12)) + 1
    return k / share.size, share[0]


def feat_pca(sample) -> FeatureVector:
    X = np.asarray(sample.points, dtype=float)
    y = np.asarray(sample.values, dtype=float)
    s, n = X.shape
    prop, pc1 = {}, {}
    for v in VARIANTS:
        prop[v] = pc1[v] = None
        if s > n + 1:
            M = X if v.endswith("_x") else np.column_stack([X, y])
            prop[v], pc1[v] = explained(M, v.startswith("cor"))
    pairs = [(f"expl_var.{v}", prop[v]) for v in VARIANTS]
    pairs += [(f"expl_var_PC1.{v}", pc1[v]) for v in VARIANTS]
    return FeatureVector.from_class("pca", pairs)
