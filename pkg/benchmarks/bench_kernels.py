"""Time each kernel in its numba and pure-numpy flavour.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both flavours are imported side by side from ``asportfolio._kernels``, so
the ASPORTFOLIO_DISABLE_NUMBA flag does not need to be toggled. Reported
times are the minimum over repeats (after one warm-up call that also
triggers compilation).
"""

import argparse
import timeit

import numpy as np

from asportfolio import _kernels as K
from asportfolio.ela.level import canonical_order, quantile_labels, stratified_folds


def cases():
    rng = np.random.default_rng(0)
    X = rng.uniform(-5, 5, (250, 5))  # s = 50n at n = 5
    f = np.sum(X**2, axis=1)
    D = K._distances_nb(X)
    lab = quantile_labels(f, 25).astype(np.int64)
    folds = stratified_folds(lab, canonical_order(X, f))

    Xt = rng.normal(size=(115, 60))  # one LOFO training set
    yt = Xt[:, 0] + rng.normal(size=115)
    order = K.column_order(Xt)
    rows = rng.integers(0, 115, 115)
    tree = K._build_tree_nb(Xt, yt, order, rows, 1, 20, 2)
    # 100 copies of one tree, packed the way RandomForest packs them
    packed = [np.concatenate([tree[i][: tree[5]]] * 100) for i in range(5)]
    offsets = np.arange(101, dtype=np.int64) * tree[5]
    return {
        "distances (250x5)": ((X,), "distances"),
        "nearest_better (250)": ((D, f), "nearest_better"),
        "nn_tour (250)": ((D,), "nn_tour"),
        "build_tree (115x60)": ((Xt, yt, order, rows, 1, 20, 2), "build_tree"),
        "predict_forest (100 trees, 115 rows)": ((Xt, *packed, offsets), "predict_forest"),
        "discriminant_cv (250x5, 10 folds)": ((X, lab, folds, 10), "discriminant_cv"),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':40s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s}")
    for label, (inputs, name) in cases().items():
        times = []
        for impl in K.IMPLEMENTATIONS[name]:
            impl(*inputs)  # warm-up / compile
            t = timeit.Timer(lambda: impl(*inputs))
            n, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, n)) / n)
        print(f"{label:40s} {times[0] * 1e6:10.1f}us {times[1] * 1e6:10.1f}us "
              f"{times[1] / times[0]:7.1f}x")  # fmt: skip


if __name__ == "__main__":
    main()
