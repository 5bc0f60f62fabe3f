"""Meta-model features: least-squares linear and quadratic fits."""

import numpy as np

from .vector import FeatureVector

NAMES = (
    "lin_simple.adj_r2",
    "lin_simple.intercept",
    "lin_simple.coef.min",
    "lin_simple.coef.max",
    "lin_simple.coef.max_by_min",
    "lin_w_interact.adj_r2",
    "quad_simple.adj_r2",
    "quad_simple.cond",
    "quad_w_interact.adj_r2",
)


def _interactions(X):
    n = X.shape[1]
    cols = [X[:, i] * X[:, j] for i in range(n) for j in range(i + 1, n)]
    return np.column_stack(cols) if cols else np.empty((X.shape[0], 0))


def design_matrices(X):
    one = np.ones((X.shape[0], 1))
    inter = _interactions(X)
    sq = X * X
    return {
        "lin_simple": np.hstack([one, X]),
        "lin_w_interact": np.hstack([one, X, inter]),
        "quad_simple": np.hstack([one, X, sq]),
        "quad_w_interact": np.hstack([one, X, sq, inter]),
    }


def fit(A, y):
    """Least squares; returns (coef, adj_r2) or None when gated or rank deficient.

    A fit is attempted only with at least two observations per coefficient.
    """
    s, p = A.shape
    if s < 2 * p:
        return None
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < p:
        return None
    resid = y - A @ coef
    ss_tot = np.sum((y - y.mean()) ** 2)
    if not ss_tot > 0:
        return coef, None
    r2 = 1.0 - np.sum(resid**2) / ss_tot
    adj = 1.0 - (1.0 - r2) * (s - 1) / (s - p)
    return coef, adj


def _ratio(top, bottom):
    return top / bottom if bottom > 0 else None


def feat_meta(sample) -> FeatureVector:
    X = np.asarray(sample.points, dtype=float)
    y = np.asarray(sample.values, dtype=float)
    n = X.shape[1]
    fits = {name: fit(A, y) for name, A in design_matrices(X).items()}
    out = dict.fromkeys(NAMES)
    lin = fits["lin_simple"]
    if lin is not None:
        coef, adj = lin
        a = np.abs(coef[1:])
        out["lin_simple.adj_r2"] = adj
        out["lin_simple.intercept"] = coef[0]
        out["lin_simple.coef.min"] = a.min()
        out["lin_simple.coef.max"] = a.max()
        out["lin_simple.coef.max_by_min"] = _ratio(a.max(), a.min())
    for name in ("lin_w_interact", "quad_simple", "quad_w_interact"):
        if fits[name] is not None:
            out[f"{name}.adj_r2"] = fits[name][1]
    quad = fits["quad_simple"]
    if quad is not None:
        a = np.abs(quad[0][1 + n : 1 + 2 * n])
        out["quad_simple.cond"] = _ratio(a.max(), a.min())
    return FeatureVector.from_class("ela_meta", [(k, out[k]) for k in NAMES])
