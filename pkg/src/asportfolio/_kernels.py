"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public names at the bottom dispatch on ``_accel.USE_NUMBA``. The two
flavours of ``build_tree`` and ``predict_forest`` are kept bit-identical
(same summation order, stable sorts, same tie rules); the geometric kernels
agree to rounding.
"""

import numpy as np

from ._accel import njit, pick

# ---------------------------------------------------------------------------
# pairwise distances


def _distances_np(X):
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


@njit
def _distances_nb(X):
    m, n = X.shape
    D = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            acc = 0.0
            for k in range(n):
                t = X[i, k] - X[j, k]
                acc += t * t
            d = np.sqrt(acc)
            D[i, j] = d
            D[j, i] = d
    return D


# ---------------------------------------------------------------------------
# nearest neighbour / nearest better


def _nearest_better_np(D, f):
    """Return (nn_dist, nb_dist, nb_index); nb_index is -1 for global bests."""
    m = D.shape[0]
    off = D + np.diag(np.full(m, np.inf))
    nn = off.min(axis=1)
    better = f[None, :] < f[:, None]
    masked = np.where(better, D, np.inf)
    nb_idx = np.argmin(masked, axis=1)
    nb = masked[np.arange(m), nb_idx]
    none = ~better.any(axis=1)
    nb = np.where(none, off.max(axis=1, initial=0.0, where=np.isfinite(off)), nb)
    nb_idx = np.where(none, -1, nb_idx)
    return nn, nb, nb_idx


@njit
def _nearest_better_nb(D, f):
    m = D.shape[0]
    nn = np.empty(m)
    nb = np.empty(m)
    nb_idx = np.empty(m, dtype=np.int64)
    for i in range(m):
        best_nn = np.inf
        best_nb = np.inf
        arg_nb = -1
        far = 0.0
        for j in range(m):
            if j == i:
                continue
            d = D[i, j]
            if d < best_nn:
                best_nn = d
            if d > far:
                far = d
            if f[j] < f[i] and d < best_nb:
                best_nb = d
                arg_nb = j
        nn[i] = best_nn
        if arg_nb < 0:
            nb[i] = far
        else:
            nb[i] = best_nb
        nb_idx[i] = arg_nb
    return nn, nb, nb_idx


# ---------------------------------------------------------------------------
# greedy nearest-neighbour tour from row 0; ties go to the lowest row index


def _nn_tour_np(D):
    m = D.shape[0]
    order = np.empty(m, dtype=np.int64)
    visited = np.zeros(m, dtype=bool)
    cur = 0
    for step in range(m):
        order[step] = cur
        visited[cur] = True
        if step == m - 1:
            break
        row = np.where(visited, np.inf, D[cur])
        cur = int(np.argmin(row))
    return order


@njit
def _nn_tour_nb(D):
    m = D.shape[0]
    order = np.empty(m, dtype=np.int64)
    visited = np.zeros(m, dtype=np.bool_)
    cur = 0
    for step in range(m):
        order[step] = cur
        visited[cur] = True
        if step == m - 1:
            break
        best = np.inf
        arg = -1
        for j in range(m):
            if not visited[j] and D[cur, j] < best:
                best = D[cur, j]
                arg = j
        cur = arg
    return order


# ---------------------------------------------------------------------------
# regression trees
#
# A tree is five flat arrays (feature, threshold, left, right, value) plus a
# node count. Leaves have feature == -1; rows go left when x <= threshold.
#
# Presorted CART on the distinct rows of the bootstrap sample, each weighted
# by its multiplicity; copies of one row can never be separated by a split,
# so this grows the same trees as working on the raw draws with about a third
# less work. ``order[f]`` is the stable sort order of column f
# (``column_order``), computed once per forest. Each node keeps, for every
# feature, its rows in ascending feature order; a split stably partitions
# those lists, so nothing is sorted below the root. Size limits (min_leaf)
# count bootstrap draws, i.e. weights.
#
# Candidates at node t come from a Fisher-Yates shuffle of the columns driven
# by splitmix64(seed ^ (t * d + i)); columns constant inside the node are
# skipped and do not count towards ``mtry``. A child's weighted target sum is
# the running sum of the winning scan (left) or parent minus left (right).

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


@njit
def _mix_nb(x):
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _mix_np(x):
    with np.errstate(over="ignore"):
        x = x + _GOLD
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def column_order(X):
    """(d, n) int64: row indices of each column in stable ascending order."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)


@njit
def _build_tree_nb(X, y, order, rows, seed, mtry, min_leaf):
    n_rows, d = X.shape
    N = rows.shape[0]
    mult = np.zeros(n_rows, dtype=np.int64)
    for j in range(N):
        mult[rows[j]] += 1
    local = np.full(n_rows, -1, dtype=np.int64)
    nu = 0
    for r in range(n_rows):
        if mult[r] > 0:
            local[r] = nu
            nu += 1
    # feature-major copy keeps each column scan inside a few cache lines
    wb = np.empty(nu)
    yb = np.empty(nu)
    wy = np.empty(nu)
    xb = np.empty((d, nu))
    for r in range(n_rows):
        u = local[r]
        if u >= 0:
            wb[u] = mult[r]
            yb[u] = y[r]
            wy[u] = mult[r] * y[r]
            for f in range(d):
                xb[f, u] = X[r, f]
    S = np.empty((d, nu), dtype=np.int64)
    for f in range(d):
        c = 0
        for k in range(n_rows):
            u = local[order[f, k]]
            if u >= 0:
                S[f, c] = u
                c += 1
    root_total = 0.0
    for u in range(nu):
        root_total += wy[u]

    cap = 2 * nu + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    goes_left = np.zeros(nu, dtype=np.int64)
    buf = np.empty(nu, dtype=np.int64)
    perm = np.empty(d, dtype=np.int64)
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_node = np.empty(cap, dtype=np.int64)
    st_total = np.empty(cap)
    st_w = np.empty(cap)
    st_row = np.empty(cap, dtype=np.int64)
    st_start[0] = 0
    st_end[0] = nu
    st_node[0] = 0
    st_total[0] = root_total
    st_w[0] = N
    st_row[0] = 0
    top = 1
    n_nodes = 1
    useed = np.uint64(seed)
    ud = np.uint64(d)

    while top > 0:
        top -= 1
        start = st_start[top]
        end = st_end[top]
        node = st_node[top]
        total = st_total[top]
        wsum = st_w[top]
        srow = st_row[top]
        value[node] = total / wsum
        if wsum < 2 * min_leaf:
            continue
        ymin = np.inf
        ymax = -np.inf
        for i in range(start, end):
            v = yb[S[srow, i]]
            ymin = min(ymin, v)
            ymax = max(ymax, v)
        if ymin == ymax:
            continue

        best_score = total * total / wsum
        best_feat = -1
        best_thr = 0.0
        best_sl = 0.0
        best_wl = 0.0
        for f in range(d):
            perm[f] = f
        base = np.uint64(node) * ud
        visited = 0
        for t in range(d):
            if visited >= mtry:
                break
            h = _mix_nb(useed ^ (base + np.uint64(t)))
            p = t + np.int64(h % np.uint64(d - t))
            f = perm[p]
            perm[p] = perm[t]
            perm[t] = f
            if xb[f, S[f, start]] == xb[f, S[f, end - 1]]:
                continue
            visited += 1
            xf = xb[f]
            sl = 0.0
            wl = 0.0
            b = xf[S[f, start]]
            for i in range(start, end - 1):
                u = S[f, i]
                sl += wy[u]
                wl += wb[u]
                a = b
                b = xf[S[f, i + 1]]
                if wsum - wl < min_leaf:
                    break
                if wl < min_leaf or not a < b:
                    continue
                sr = total - sl
                score = sl * sl / wl + sr * sr / (wsum - wl)
                if score > best_score:
                    best_score = score
                    best_feat = f
                    best_sl = sl
                    best_wl = wl
                    thr = 0.5 * (a + b)
                    if thr >= b:
                        thr = a
                    best_thr = thr

        if best_feat < 0:
            continue

        nl = 0
        for i in range(start, end):
            j = S[best_feat, i]
            g = 1 if xb[best_feat, j] <= best_thr else 0
            goes_left[j] = g
            nl += g
        if best_wl >= 2 * min_leaf or wsum - best_wl >= 2 * min_leaf:
            # branch-free stable partition; the flags are close to coin
            # flips. Columns constant here stay constant in both children
            # whatever order their rows end up in, so they are left alone.
            for f in range(d):
                if xb[f, S[f, start]] == xb[f, S[f, end - 1]]:
                    continue
                a_pos = start
                b_pos = 0
                for i in range(start, end):
                    j = S[f, i]
                    g = goes_left[j]
                    S[f, a_pos] = j
                    buf[b_pos] = j
                    a_pos += g
                    b_pos += 1 - g
                for i in range(b_pos):
                    S[f, a_pos + i] = buf[i]

        feature[node] = best_feat
        threshold[node] = best_thr
        lc = n_nodes
        rc = n_nodes + 1
        n_nodes += 2
        left[node] = lc
        right[node] = rc
        # right first so the left subtree is expanded first
        st_start[top] = start + nl
        st_end[top] = end
        st_node[top] = rc
        st_total[top] = total - best_sl
        st_w[top] = wsum - best_wl
        st_row[top] = best_feat
        top += 1
        st_start[top] = start
        st_end[top] = start + nl
        st_node[top] = lc
        st_total[top] = best_sl
        st_w[top] = best_wl
        st_row[top] = best_feat
        top += 1

    return feature, threshold, left, right, value, n_nodes


def _build_tree_np(X, y, order, rows, seed, mtry, min_leaf):
    rows = np.asarray(rows, dtype=np.int64)
    n_rows, d = X.shape
    N = rows.shape[0]
    mult = np.bincount(rows, minlength=n_rows)
    uniq = np.flatnonzero(mult)
    nu = uniq.size
    local = np.full(n_rows, -1, dtype=np.int64)
    local[uniq] = np.arange(nu)
    wb = mult[uniq].astype(float)
    yb = y[uniq]
    wy = mult[uniq] * yb
    xb = X[uniq].T.copy()
    L = local[order]
    S = L[L >= 0].reshape(d, nu)

    cap = 2 * nu + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    useed = np.uint64(seed)
    cols = np.arange(d)[:, None]
    # cumsum is a strict left-to-right sum, matching the compiled loops
    stack = [(S, 0, np.cumsum(wy)[-1], float(N))]
    n_nodes = 1
    while stack:
        seg, node, total, wsum = stack.pop()
        value[node] = total / wsum
        if wsum < 2 * min_leaf:
            continue
        y0 = yb[seg[0]]
        if y0.min() == y0.max():
            continue

        best_score = total * total / wsum
        best_feat = -1
        best_thr = 0.0
        best_sl = 0.0
        best_wl = 0.0
        xs = xb[cols, seg]
        perm = list(range(d))
        visited = 0
        for t in range(d):
            if visited >= mtry:
                break
            h = _mix_np(useed ^ np.uint64(node * d + t))
            p = t + int(h % np.uint64(d - t))
            perm[t], perm[p] = perm[p], perm[t]
            f = perm[t]
            xo = xs[f]
            if xo[0] == xo[-1]:
                continue
            visited += 1
            cs = np.cumsum(wy[seg[f]])[:-1]
            cw = np.cumsum(wb[seg[f]])[:-1]
            sr = total - cs
            wr = wsum - cw
            ok = (cw >= min_leaf) & (wr >= min_leaf) & (xo[:-1] < xo[1:])
            if not ok.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                score = np.where(ok, cs * cs / cw + sr * sr / wr, -np.inf)
            i = int(np.argmax(score))
            if score[i] > best_score:
                best_score = score[i]
                best_feat = f
                best_sl = cs[i]
                best_wl = cw[i]
                a, b = xo[i], xo[i + 1]
                thr = 0.5 * (a + b)
                best_thr = a if thr >= b else thr

        if best_feat < 0:
            continue
        mask = xb[best_feat][seg] <= best_thr
        nl = int(mask[0].sum())
        n = seg.shape[1]
        feature[node] = best_feat
        threshold[node] = best_thr
        lc, rc = n_nodes, n_nodes + 1
        n_nodes += 2
        left[node] = lc
        right[node] = rc
        stack.append((seg[~mask].reshape(d, n - nl), rc, total - best_sl, wsum - best_wl))
        stack.append((seg[mask].reshape(d, nl), lc, best_sl, best_wl))

    return feature, threshold, left, right, value, n_nodes


@njit
def _predict_forest_nb(X, feature, threshold, left, right, value, offsets):
    m = X.shape[0]
    T = offsets.shape[0] - 1
    out = np.zeros(m)
    for t in range(T):
        base = offsets[t]
        for i in range(m):
            node = 0
            while feature[base + node] >= 0:
                if X[i, feature[base + node]] <= threshold[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
            out[i] += value[base + node]
    for i in range(m):
        out[i] /= T
    return out


def _predict_forest_np(X, feature, threshold, left, right, value, offsets):
    m = X.shape[0]
    T = offsets.shape[0] - 1
    out = np.zeros(m)
    rows = np.arange(m)
    for t in range(T):
        base = offsets[t]
        node = np.zeros(m, dtype=np.int64)
        while True:
            f = feature[base + node]
            inner = f >= 0
            if not inner.any():
                break
            r, nd, ff = rows[inner], node[inner], f[inner]
            go_left = X[r, ff] <= threshold[base + nd]
            node[inner] = np.where(go_left, left[base + nd], right[base + nd])
        out += value[base + node]
    return out / T


# ---------------------------------------------------------------------------
# LDA / QDA cross-validation for the level-set features
#
# Two classes (labels 0/1), fold ids per row. Returns the mean over non-empty
# folds of the test misclassification rate for each classifier, plus a flag
# per classifier that is False when some covariance was not positive
# definite. A class wins only with a strictly larger discriminant.


@njit
def _chol_nb(A, L):
    n = A.shape[0]
    for j in range(n):
        s = A[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if not s > 0.0:
            return False
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            t = A[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k]
            L[i, j] = t / L[j, j]
    return True


@njit
def _mahal_nb(L, v, w):
    # |L^-1 v|^2 by forward substitution
    acc = 0.0
    for i in range(v.shape[0]):
        t = v[i]
        for k in range(i):
            t -= L[i, k] * w[k]
        w[i] = t / L[i, i]
        acc += w[i] * w[i]
    return acc


@njit
def _discriminant_cv_nb(X, lab, fold, n_folds):
    m, n = X.shape
    lda_sum = 0.0
    qda_sum = 0.0
    used = 0
    lda_ok = True
    qda_ok = True
    mu = np.zeros((2, n))
    scat = np.zeros((2, n, n))
    pooled = np.zeros((n, n))
    cov = np.zeros((n, n))
    Lp = np.zeros((n, n))
    Lq = np.zeros((2, n, n))
    logdet = np.zeros(2)
    v = np.empty(n)
    w = np.empty(n)
    for k in range(n_folds):
        n_test = 0
        for i in range(m):
            if fold[i] == k:
                n_test += 1
        if n_test == 0:
            continue
        mu[:] = 0.0
        scat[:] = 0.0
        cnt = np.zeros(2)
        for i in range(m):
            if fold[i] != k:
                c = lab[i]
                cnt[c] += 1.0
                for a in range(n):
                    mu[c, a] += X[i, a]
        for c in range(2):
            for a in range(n):
                mu[c, a] /= cnt[c]
        for i in range(m):
            if fold[i] != k:
                c = lab[i]
                for a in range(n):
                    v[a] = X[i, a] - mu[c, a]
                for a in range(n):
                    for b in range(n):
                        scat[c, a, b] += v[a] * v[b]
        n_train = cnt[0] + cnt[1]
        for a in range(n):
            for b in range(n):
                pooled[a, b] = (scat[0, a, b] + scat[1, a, b]) / (n_train - 2.0)
        Lp[:] = 0.0
        if lda_ok and not _chol_nb(pooled, Lp):
            lda_ok = False
        if qda_ok:
            for c in range(2):
                for a in range(n):
                    for b in range(n):
                        cov[a, b] = scat[c, a, b] / (cnt[c] - 1.0)
                Lq[c] = 0.0
                if not _chol_nb(cov, Lq[c]):
                    qda_ok = False
                    break
                t = 0.0
                for a in range(n):
                    t += np.log(Lq[c, a, a])
                logdet[c] = 2.0 * t
        if not (lda_ok or qda_ok):
            break
        lp0 = np.log(cnt[0] / n_train)
        lp1 = np.log(cnt[1] / n_train)
        wrong_l = 0
        wrong_q = 0
        for i in range(m):
            if fold[i] != k:
                continue
            if lda_ok:
                for a in range(n):
                    v[a] = X[i, a] - mu[0, a]
                s0 = -0.5 * _mahal_nb(Lp, v, w) + lp0
                for a in range(n):
                    v[a] = X[i, a] - mu[1, a]
                s1 = -0.5 * _mahal_nb(Lp, v, w) + lp1
                if (1 if s1 > s0 else 0) != lab[i]:
                    wrong_l += 1
            if qda_ok:
                for a in range(n):
                    v[a] = X[i, a] - mu[0, a]
                s0 = -0.5 * _mahal_nb(Lq[0], v, w) - 0.5 * logdet[0] + lp0
                for a in range(n):
                    v[a] = X[i, a] - mu[1, a]
                s1 = -0.5 * _mahal_nb(Lq[1], v, w) - 0.5 * logdet[1] + lp1
                if (1 if s1 > s0 else 0) != lab[i]:
                    wrong_q += 1
        lda_sum += wrong_l / n_test
        qda_sum += wrong_q / n_test
        used += 1
    if used == 0:
        return np.nan, np.nan, False, False
    return lda_sum / used, qda_sum / used, lda_ok, qda_ok


def _discriminant_cv_np(X, lab, fold, n_folds):
    from scipy.linalg import solve_triangular

    def score(L, mu, pts, extra):
        w = solve_triangular(L, (pts - mu).T, lower=True)
        return -0.5 * np.sum(w * w, axis=0) + extra

    errs = {"lda": [], "qda": []}
    ok = {"lda": True, "qda": True}
    for k in range(n_folds):
        test = fold == k
        if not test.any():
            continue
        tr_X, tr_l = X[~test], lab[~test]
        te_X, te_l = X[test], lab[test]
        mus, scats, cnts = [], [], []
        for c in (0, 1):
            Xc = tr_X[tr_l == c]
            mu = Xc.mean(axis=0)
            d = Xc - mu
            mus.append(mu)
            scats.append(d.T @ d)
            cnts.append(Xc.shape[0])
        n_train = tr_X.shape[0]
        lp = [np.log(c / n_train) for c in cnts]
        if ok["lda"]:
            try:
                L = np.linalg.cholesky((scats[0] + scats[1]) / (n_train - 2))
                s0 = score(L, mus[0], te_X, lp[0])
                s1 = score(L, mus[1], te_X, lp[1])
                errs["lda"].append(int(np.sum((s1 > s0) != te_l)) / te_l.size)
            except np.linalg.LinAlgError:
                ok["lda"] = False
        if ok["qda"]:
            try:
                sc = []
                for c in (0, 1):
                    L = np.linalg.cholesky(scats[c] / (cnts[c] - 1))
                    logdet = 2.0 * np.sum(np.log(np.diag(L)))
                    sc.append(score(L, mus[c], te_X, lp[c] - 0.5 * logdet))
                errs["qda"].append(int(np.sum((sc[1] > sc[0]) != te_l)) / te_l.size)
            except np.linalg.LinAlgError:
                ok["qda"] = False
        if not (ok["lda"] or ok["qda"]):
            break
    if not errs["lda"] and not errs["qda"]:
        return np.nan, np.nan, False, False
    # plain left-to-right sums, as in the compiled loop
    lda = sum(errs["lda"], 0.0) / len(errs["lda"]) if ok["lda"] else np.nan
    qda = sum(errs["qda"], 0.0) / len(errs["qda"]) if ok["qda"] else np.nan
    return lda, qda, ok["lda"], ok["qda"]


# ---------------------------------------------------------------------------
# dispatch

distances = pick(_distances_nb, _distances_np)
nearest_better = pick(_nearest_better_nb, _nearest_better_np)
nn_tour = pick(_nn_tour_nb, _nn_tour_np)
build_tree = pick(_build_tree_nb, _build_tree_np)
predict_forest = pick(_predict_forest_nb, _predict_forest_np)
discriminant_cv = pick(_discriminant_cv_nb, _discriminant_cv_np)

IMPLEMENTATIONS = {
    "distances": (_distances_nb, _distances_np),
    "nearest_better": (_nearest_better_nb, _nearest_better_np),
    "nn_tour": (_nn_tour_nb, _nn_tour_np),
    "build_tree": (_build_tree_nb, _build_tree_np),
    "predict_forest": (_predict_forest_nb, _predict_forest_np),
    "discriminant_cv": (_discriminant_cv_nb, _discriminant_cv_np),
}
