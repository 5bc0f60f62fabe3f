"""Friedman average ranks, the Wilcoxon rank-sum test and the SBS / VBS tallies."""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np
from scipy.stats import rankdata

EXACT_LIMIT = 20
ALPHA = 0.05


def friedman_average_ranks(results) -> np.ndarray:
    """Mean over problems (columns) of each system's (row's) rank; ties averaged."""
    R = np.asarray(results, dtype=float)
    if R.ndim != 2 or R.shape[0] < 2 or R.shape[1] < 2:
        raise ValueError("need a systems x problems matrix with at least 2 of each")
    ranks = rankdata(R, axis=0, method="average")
    return ranks.mean(axis=1)


def friedman_statistic(results) -> float:
    """Tie-corrected Friedman chi-square (reported for reference only)."""
    R = np.asarray(results, dtype=float)
    k, N = R.shape
    ranks = rankdata(R, axis=0, method="average")
    ss = N * np.sum((ranks.mean(axis=1) - (k + 1) / 2.0) ** 2)
    ties = 0.0
    for j in range(N):
        _, t = np.unique(R[:, j], return_counts=True)
        ties += float(np.sum(t**3 - t))
    denom = 1.0 - ties / (N * (k**3 - k))
    return 0.0 if denom <= 0 else float(12.0 * ss / (k * (k + 1)) / denom)


def _subset_sum_counts(r2, na):
    """counts[s] = number of na-subsets of the integers r2 with sum s (exact)."""
    total = int(sum(r2))
    dp = [[0] * (total + 1) for _ in range(na + 1)]
    dp[0][0] = 1
    for v in r2:
        for j in range(na, 0, -1):
            src, dst = dp[j - 1], dp[j]
            for s in range(total - v, -1, -1):
                if src[s]:
                    dst[s + v] += src[s]
    return dp[na]


def wilcoxon_rank_sum(a, b, method="auto"):
    """Rank sum W of ``a`` in the pooled midranks and its two-sided p-value.

    ``method`` is "exact" (all C(N, |a|) rank assignments, counted on doubled
    midranks so ties stay integral), "normal" (tie- and continuity-corrected
    normal approximation), or "auto": exact when |a| + |b| <= 20.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    na, nb = a.size, b.size
    if na < 1 or nb < 1:
        raise ValueError("both samples must be non-empty")
    N = na + nb
    ranks = rankdata(np.concatenate([a, b]), method="average")
    W = float(ranks[:na].sum())
    if method == "auto":
        method = "exact" if N <= EXACT_LIMIT else "normal"
    if method == "exact":
        r2 = [int(round(2 * r)) for r in ranks]
        counts = _subset_sum_counts(r2, na)
        e2 = na * (N + 1)  # twice the null mean of W
        d_obs = abs(int(round(2 * W)) - e2)
        hit = sum(c for s, c in enumerate(counts) if c and abs(s - e2) >= d_obs)
        return W, min(1.0, hit / math.comb(N, na))
    if method != "normal":
        raise ValueError("method must be 'auto', 'exact' or 'normal'")
    _, t = np.unique(ranks, return_counts=True)
    var = na * nb / 12.0 * ((N + 1) - float(np.sum(t**3 - t)) / (N * (N - 1)))
    if var <= 0:
        return W, 1.0
    z = max(abs(W - na * (N + 1) / 2.0) - 0.5, 0.0) / math.sqrt(var)
    return W, min(1.0, math.erfc(z / math.sqrt(2.0)))


def compare_symbol(as_errors, sbs_errors, alpha=ALPHA) -> str:
    """'+' if the AS errors are significantly lower, '-' if higher, else '≈'."""
    a = np.asarray(as_errors, dtype=float)
    W, p = wilcoxon_rank_sum(a, sbs_errors)
    if p >= alpha:
        return "≈"
    mean_w = a.size * (a.size + np.size(sbs_errors) + 1) / 2.0
    return "+" if W < mean_w else "-"


def sbs_comparison(per_function, alpha=ALPHA):
    """``per_function[fid] = (as_errors, sbs_errors)`` -> ({fid: symbol}, (plus, minus, approx))."""
    symbols = {f: compare_symbol(a, s, alpha) for f, (a, s) in sorted(per_function.items())}
    vals = list(symbols.values())
    return symbols, (vals.count("+"), vals.count("-"), vals.count("≈"))


def format_tally(tally) -> str:
    return "/".join(str(int(t)) for t in tally)


def vbs_selection_rate(results, full_budget=False) -> dict:
    """Percentage of runs per function whose selected member reaches the VBS error.

    With ``full_budget`` the VBS and the selected member are judged at 100n
    instead of the budget actually left after sampling.
    """
    hits, n = defaultdict(int), defaultdict(int)
    for r in results:
        if full_budget:
            ok = r.selected_error_full == r.vbs_error_full
        else:
            ok = r.error == r.vbs_error
        hits[r.function_id] += int(ok)
        n[r.function_id] += 1
    return {f: 100.0 * hits[f] / n[f] for f in sorted(n)}
