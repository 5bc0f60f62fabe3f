"""Information-content features along a nearest-neighbour tour."""

import numpy as np

from .._kernels import distances, nn_tour
from .vector import FeatureVector

NAMES = ("h_max", "eps_s", "eps_max", "eps_ratio", "m0")
EPS_GRID = np.concatenate([[0.0], np.logspace(-5, 15, 1000)])
SETTLE_FRACTION = 0.05


def tour_slopes(X, y, D=None):
    """Slopes between consecutive points of a greedy nearest-neighbour tour.

    The tour starts at the lexicographically smallest point and visits rows in
    lexicographic order on distance ties, so it does not depend on row order.
    Zero-length steps are dropped.
    """
    lex = np.lexsort(X.T[::-1])
    Xs = np.ascontiguousarray(X[lex])
    Ds = distances(Xs) if D is None else np.ascontiguousarray(D[np.ix_(lex, lex)])
    order = nn_tour(Ds)
    pts, vals = Xs[order], y[lex][order]
    step = np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1))
    keep = step > 0
    return np.diff(vals)[keep] / step[keep]


def symbols(phi, eps):
    """(len(eps), len(phi)) matrix of -1 / 0 / 1 with dead zone ``eps``."""
    e = np.asarray(eps)[:, None]
    return (phi[None, :] > e).astype(np.int8) - (phi[None, :] < -e).astype(np.int8)


def entropy(sym):
    """H(eps): base-6 entropy of unequal adjacent symbol pairs, one per row."""
    m = sym.shape[1] - 1
    if m < 1:
        return np.zeros(sym.shape[0])
    codes = (sym[:, :-1] + 1) * 3 + (sym[:, 1:] + 1)
    H = np.zeros(sym.shape[0])
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            p = np.sum(codes == a * 3 + b, axis=1) / m
            nz = p > 0
            H[nz] -= p[nz] * np.log(p[nz]) / np.log(6.0)
    return H


def partial_information(sym_row, s):
    """Sign changes after dropping zeros, over s - 1."""
    nz = sym_row[sym_row != 0]
    if s < 2:
        return 0.0
    return float(np.count_nonzero(nz[1:] != nz[:-1])) / (s - 1)


def feat_ic(sample, seed=0, D=None) -> FeatureVector:
    # ``seed`` is accepted for interface symmetry; the tour start is canonical
    X = np.asarray(sample.points, dtype=float)
    y = np.asarray(sample.values, dtype=float)
    s = y.size
    out = dict.fromkeys(NAMES)
    if s >= 10:
        phi = tour_slopes(X, y, D)
        scale = np.max(np.abs(phi)) if phi.size else 0.0
        if scale > 0:
            eps = EPS_GRID * scale
            sym = symbols(phi, eps)
            H = entropy(sym)
            h_max = H.max()
            out["h_max"] = h_max
            out["m0"] = partial_information(sym[0], s)
            if h_max > 0:
                peak = 1 + int(np.argmax(H[1:]))
                eps_max = eps[peak]
                below = np.flatnonzero(H[peak:] < SETTLE_FRACTION * h_max)
                out["eps_max"] = eps_max
                if below.size:
                    eps_s = eps[peak + below[0]]
                    out["eps_s"] = eps_s
                    out["eps_ratio"] = np.log10(eps_s / eps_max)
        else:
            out["h_max"] = 0.0
            out["m0"] = 0.0
    return FeatureVector.from_class("ic", [(k, out[k]) for k in NAMES])
