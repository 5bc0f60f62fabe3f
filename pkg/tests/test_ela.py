import math

import numpy as np
import pytest

from asportfolio.ela import FEATURE_CLASSES, compute_features, feature_names
from asportfolio.ela.basic import feat_basic
from asportfolio.ela.disp import feat_disp
from asportfolio.ela.distr import feat_distr
from asportfolio.ela.ic import entropy, feat_ic, symbols, tour_slopes
from asportfolio.ela.level import feat_level
from asportfolio.ela.meta import feat_meta
from asportfolio.ela.nbc import feat_nbc
from asportfolio.ela.pca import feat_pca
from asportfolio.ela.vector import FeatureVector, read_feature_csv, write_feature_csv
from asportfolio.sample import BudgetLedger, draw_sample, latin_hypercube
from asportfolio.suite import get_instance

from conftest import make_sample

INVARIANT_CLASSES = ("ela_distr", "ela_level", "nbc", "disp")


def seeded_samples(count=50):
    out = []
    for j in range(count):
        fid = 1 + j % 24
        dim = (2, 3, 5)[j % 3]
        s = (20, 25, 50)[j % 3] * dim
        out.append(draw_sample(get_instance(fid, 1 + j % 5, dim), s, 1000 + j,
                               BudgetLedger.for_dim(dim)))
    return out


def assert_same(a, b, names, tol=1e-9):
    for n in names:
        x, y = a[n], b[n]
        assert (x is None) == (y is None), n
        if x is not None:
            assert abs(x - y) <= tol * max(1.0, abs(x)), (n, x, y)


def class_names(fv, cls):
    return [n for n in fv.names if n.startswith(cls + ".")]


# -- invariances -------------------------------------------------------------


def test_translation_and_scale_invariance():
    for smp in seeded_samples():
        base = compute_features(smp, seed=1)
        names = [n for c in INVARIANT_CLASSES for n in class_names(base, c)]
        shifted = compute_features(smp.with_values(smp.values + 37.25), seed=1)
        scaled = compute_features(smp.with_values(3.3 * smp.values), seed=1)
        assert_same(base, shifted, names + ["ic.h_max", "ic.m0"])
        assert_same(base, scaled, names + ["ic.h_max"])


def test_row_permutation_invariance():
    smp = seeded_samples(3)[2]
    perm = np.random.default_rng(0).permutation(smp.size)
    other = make_sample(smp.points[perm], smp.values[perm])
    a, b = compute_features(smp), compute_features(other)
    assert_same(a, b, a.names)


def test_no_nan_in_entries():
    for smp in seeded_samples(12):
        fv = compute_features(smp)
        for v in fv.entries.values():
            assert v is None or math.isfinite(v)


# -- distr -------------------------------------------------------------------


def test_distr_moments():
    fv = feat_distr(make_sample([[0.0], [1.0], [2.0]], [-1.0, 0.0, 1.0]))
    assert fv["ela_distr.skewness"] == 0.0
    m2, m4 = 2 / 3, 2 / 3  # direct moment formula
    assert fv["ela_distr.kurtosis"] == pytest.approx(m4 / m2**2 - 3.0, abs=1e-12)
    assert fv["ela_distr.kurtosis"] == pytest.approx(-1.5, abs=1e-12)
    const = feat_distr(make_sample(np.arange(6.0), np.full(6, 2.0)))
    assert const["ela_distr.skewness"] is None and const["ela_distr.kurtosis"] is None
    assert const["ela_distr.number_of_peaks"] == 1


def test_distr_bimodal_peaks():
    y = np.concatenate([np.zeros(50), np.full(50, 10.0)]) + np.linspace(0, 0.5, 100)
    fv = feat_distr(make_sample(np.arange(100.0), y))
    assert fv["ela_distr.number_of_peaks"] == 2


# -- level -------------------------------------------------------------------


def test_level_separable_gives_zero_lda():
    # 1-D, values increasing in x: the best 10% are the smallest x
    x = np.concatenate([np.linspace(-5, -4, 10), np.linspace(0, 5, 90)])
    fv = feat_level(make_sample(x, x + 5.0))
    assert fv["ela_level.mmce_lda_10"] == 0.0


def test_level_small_class_missing():
    x = np.linspace(-5, 5, 30)
    fv = feat_level(make_sample(x, x))
    # ceil(0.1 * 30) = 3 < 10 members
    assert fv["ela_level.mmce_lda_10"] is None and fv["ela_level.lda_qda_10"] is None
    assert fv["ela_level.mmce_lda_50"] is not None
    assert all(v is None for v in feat_level(make_sample(x[:15], x[:15])).entries.values())


def test_level_xor_quadratic_beats_linear():
    # four clusters; the "low" class occupies two opposite corners
    rng = np.random.default_rng(3)
    centres = np.array([[-3, -3], [3, 3], [-3, 3], [3, -3]], dtype=float)
    X = np.vstack([c + 0.4 * rng.standard_normal((20, 2)) for c in centres])
    y = np.concatenate([np.zeros(40), np.ones(40)]) + 1e-3 * np.arange(80)
    fv = feat_level(make_sample(X, y))
    # hand discriminants: equal class means at the origin make LDA chance level,
    # while class covariances of opposite correlation let QDA separate
    assert fv["ela_level.mmce_lda_50"] > 0.3
    assert fv["ela_level.mmce_qda_50"] < 0.05
    assert fv["ela_level.mmce_lda_50"] > fv["ela_level.mmce_qda_50"]


# -- meta --------------------------------------------------------------------


def test_meta_exact_linear():
    x = np.linspace(-5, 5, 20)
    fv = feat_meta(make_sample(x, 3.0 + 2.0 * x))
    assert fv["ela_meta.lin_simple.adj_r2"] == pytest.approx(1.0, abs=1e-9)
    assert fv["ela_meta.lin_simple.intercept"] == pytest.approx(3.0, abs=1e-9)


def test_meta_condition_proxy():
    X = latin_hypercube(2, 60, 1)
    fv = feat_meta(make_sample(X, (X**2).sum(axis=1)))
    assert fv["ela_meta.quad_simple.cond"] == pytest.approx(1.0, abs=1e-9)
    fv = feat_meta(make_sample(X, X[:, 0] ** 2 + 100 * X[:, 1] ** 2))
    # oracle: normal equations on the pure-quadratic design
    A = np.hstack([np.ones((60, 1)), X, X**2])
    beta = np.linalg.solve(A.T @ A, A.T @ (X[:, 0] ** 2 + 100 * X[:, 1] ** 2))
    assert beta[4] / beta[3] == pytest.approx(100.0, rel=1e-9)
    assert fv["ela_meta.quad_simple.cond"] == pytest.approx(100.0, rel=1e-9)


def test_meta_rank_deficient_missing():
    X = np.column_stack([np.linspace(-5, 5, 40), np.linspace(-5, 5, 40)])
    fv = feat_meta(make_sample(X, X[:, 0]))
    assert fv["ela_meta.lin_simple.adj_r2"] is None


# -- nbc ---------------------------------------------------------------------


def test_nbc_hand_example():
    x = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    fv = feat_nbc(make_sample(x, x))
    # nn = (1,1,1,1,1); nb = (4,1,1,1,1): best point takes the max distance
    assert fv["nbc.nn_nb.mean_ratio"] == pytest.approx(8 / 5)
    fv3 = feat_nbc(make_sample(x[:3], x[:3]))
    assert all(v is None for v in fv3.entries.values())  # s < 5


def test_nbc_three_point_oracle():
    from asportfolio.ela.nbc import nbc_distances

    nn, nb = nbc_distances(np.array([[0.0], [1.0], [2.0]]), np.array([0.0, 1.0, 2.0]))[:2]
    assert list(nn) == [1, 1, 1] and list(nb) == [2, 1, 1]
    assert nb.mean() / nn.mean() == pytest.approx(4 / 3)


def test_nbc_degenerate_and_duplicates():
    x = np.arange(8.0)
    assert all(v is None for v in feat_nbc(make_sample(x, np.ones(8))).entries.values())
    X = np.array([0.0, 0.0, 1.0, 2.0, 3.0, 4.0])
    fv = feat_nbc(make_sample(X, [0.0, 0.0, 1.0, 2.0, 3.0, 4.0]))
    assert all(v is None or math.isfinite(v) for v in fv.entries.values())


# -- disp --------------------------------------------------------------------


def test_disp_constant_and_sphere():
    X = latin_hypercube(2, 100, 4)
    const = feat_disp(make_sample(X, np.zeros(100)))
    assert const["disp.ratio_mean_10"] == pytest.approx(1.0)
    assert const["disp.diff_median_25"] == pytest.approx(0.0)
    sph = feat_disp(make_sample(X, (X**2).sum(axis=1)))
    assert sph["disp.ratio_mean_02"] < 1.0
    small = feat_disp(make_sample(X[:20], np.arange(20.0)))
    assert small["disp.ratio_mean_02"] is None and small["disp.ratio_mean_10"] is not None


# -- ic ----------------------------------------------------------------------


def test_ic_constant_and_monotone():
    x = np.arange(12.0)
    fv = feat_ic(make_sample(x, np.zeros(12)))
    assert fv["ic.h_max"] == 0.0 and fv["ic.m0"] == 0.0
    assert fv["ic.eps_s"] is None
    fv = feat_ic(make_sample(x, 2.0 * x))
    assert fv["ic.h_max"] == 0.0 and fv["ic.m0"] == 0.0


def test_ic_alternating_oracle():
    x = np.arange(11.0)
    y = np.array([0.0, 1.0] * 5 + [0.0])
    phi = tour_slopes(x[:, None], y)
    assert np.array_equal(np.abs(phi), np.ones(10))
    # direct pair count: 5 pairs (+,-) and 4 pairs (-,+) among 9
    p = np.array([5, 4]) / 9
    h = -np.sum(p * np.log(p) / np.log(6))
    assert entropy(symbols(phi, np.array([0.0]))[0:1])[0] == pytest.approx(h, abs=1e-12)
    fv = feat_ic(make_sample(x, y))
    assert fv["ic.h_max"] == pytest.approx(h, abs=1e-12)
    assert fv["ic.m0"] == pytest.approx(9 / 10)


# -- pca ---------------------------------------------------------------------


def test_pca_line_and_isotropic():
    t = np.linspace(-4, 4, 30)
    fv = feat_pca(make_sample(np.column_stack([t, 0.5 * t]), np.sin(t)))
    assert fv["pca.expl_var.cov_x"] == 0.5
    X = latin_hypercube(2, 200, 8)
    fv = feat_pca(make_sample(X, X[:, 0]))
    ev = np.linalg.eigvalsh(np.cov(X.T))
    assert fv["pca.expl_var_PC1.cov_x"] == pytest.approx(ev.max() / ev.sum(), abs=1e-12)
    assert abs(fv["pca.expl_var_PC1.cov_x"] - 0.5) < 0.1
    fv = feat_pca(make_sample(X, np.ones(200)))
    assert fv["pca.expl_var.cor_init"] is None and fv["pca.expl_var.cor_x"] is not None


# -- basic and the whole vector ----------------------------------------------


def test_basic():
    fv = feat_basic(make_sample(latin_hypercube(2, 40, 0), np.linspace(1, 3, 40)))
    assert fv["basic.dim"] == 2 and fv["basic.observations"] == 40
    assert fv["basic.lower_min"] == -5 and fv["basic.upper_max"] == 5
    assert fv["basic.objective_min"] == 1 and fv["basic.objective_max"] == 3


def test_compute_features_contract(tmp_path):
    smp = make_sample(latin_hypercube(2, 20, 1), np.full(20, 4.0))
    fv = compute_features(smp)
    assert fv.names == feature_names()
    assert len(fv) == 62
    assert all(fv[n] is None for n in class_names(fv, "nbc"))
    assert fv["basic.dim"] == 2
    assert fv.status["nbc"] == "missing" and fv.status["basic"] == "ok"
    again = compute_features(smp)
    assert again == fv
    only = compute_features(smp, ("basic", "pca"))
    assert set(c.split(".")[0] for c in only.names) == {"basic", "pca"}
    with pytest.raises(ValueError):
        compute_features(smp, ("limo",))
    rows = [((1, 1, 2, 20, 99), fv)]
    p = tmp_path / "f.csv"
    write_feature_csv(p, rows)
    (key, back), = read_feature_csv(p)
    assert key == (1, 1, 2, 20, 99)
    assert all(back[n] == fv[n] for n in fv.names)
    assert "\n1,1,2,20,99," in p.read_text()
    arr = fv.to_array()
    assert np.isnan(arr[fv.names.index("nbc.nn_nb.cor")])


def test_feature_vector_names_unique():
    names = feature_names(FEATURE_CLASSES)
    assert len(names) == len(set(names)) == 62
    fv = FeatureVector.from_class("x", [("a", 1.0), ("b", float("nan"))])
    assert fv["x.b"] is None and fv.status["x"] == "partial"
