import itertools

import numpy as np
import pytest

from asportfolio.archive import Archive, MissingDataError, RankingTable, RunRecord, ranking_table
from asportfolio.portfolio import (
    Portfolio,
    build_portfolio,
    local_search,
    portfolio_label,
    portfolio_objective,
    rank_matrix,
    read_portfolios,
    single_best_solver,
    virtual_best_solver,
    write_portfolios,
)
from asportfolio.scenarios import synthetic_archive
from asportfolio.suite import get_instance


def _table(ranks_by_fn, dim=2, budget=200):
    """RankingTable from per-function {optimizer: mean error} dicts."""
    t = RankingTable()
    for f, means in ranks_by_fn.items():
        t.add(f, dim, budget, means)
    return t


# 4 optimizers x 3 functions; ranks per function:
#   f1: A1 B2 C3 D4   f2: A4 B3 C1 D2   f3: A2 B4 C3 D1
TOY = _table({
    1: {"A": 0.1, "B": 0.2, "C": 0.3, "D": 0.4},
    2: {"A": 0.4, "B": 0.3, "C": 0.1, "D": 0.2},
    3: {"A": 0.2, "B": 0.4, "C": 0.3, "D": 0.1},
})  # fmt: skip


def _obj(members, table=TOY, objective="min_rank"):
    return portfolio_objective(members, table, [1, 2, 3], [2], 200, objective)


def test_objective_examples():
    assert _obj(["B"]) == 2 + 3 + 4
    assert _obj(["A", "C"]) == 1 + 1 + 2
    assert _obj(["A", "C", "D"]) == 3  # rank 1 everywhere is the lower bound
    assert _obj(["A", "B"], objective="rank_sum") == (1 + 4 + 2) + (2 + 3 + 4)
    with pytest.raises(MissingDataError):
        _obj(["A", "Q"])


def test_toy_search_matches_enumeration():
    ids = ["A", "B", "C", "D"]
    for k in (1, 2, 3):
        best = min(_obj(c) for c in itertools.combinations(ids, k))
        R = rank_matrix(TOY, ids, [(f, 2, 200) for f in (1, 2, 3)])
        cols, val = local_search(R, k, restarts=1, seed=k)
        assert val == best == _obj([ids[c] for c in cols])


def test_sbs_and_ties():
    p = Portfolio(("A", "B", "C", "D"), 200)
    # rank sums A7 B9 C7 D7 -> tie broken towards "A"
    assert single_best_solver(p, TOY, [1, 2, 3], [2], 200) == "A"
    assert single_best_solver(Portfolio(("D", "C"), 200), TOY, [1, 2, 3], [2], 200) == "C"
    one = _table({1: {"A": 0.0, "B": 1.0}, 2: {"A": 0.0, "B": 1.0}})
    assert single_best_solver(Portfolio(("B", "A"), 200), one, [1, 2], [2], 200) == "A"


def _const_archive(errors, fid=1, dim=2):
    recs = []
    for o, e in errors.items():
        for iid in range(1, 6):
            recs.append(RunRecord.from_values(o, fid, iid, dim, 1,
                                              [get_instance(fid, iid, dim).f_opt + e]))  # fmt: skip
    return Archive(recs)


def test_vbs_examples():
    a = _const_archive({"A": 0.1, "B": 0.2, "C": 0.1})
    assert virtual_best_solver(Portfolio(("B", "A"), 1), a, 1, 1, 2, 1)[0] == "A"
    assert virtual_best_solver(Portfolio(("C", "A"), 1), a, 1, 1, 2, 1)[0] == "A"  # tie
    assert virtual_best_solver(Portfolio(("B",), 1), a, 1, 3, 2, 1)[0] == "B"


def test_vbs_dominance(desk):
    p = Portfolio(("cs", "nm", "qs", "rs"), 150)
    for f in (1, 6, 15, 21):
        for i in (1, 5):
            for b in (1, 40, 150, 200):
                o, e = virtual_best_solver(p, desk, f, i, 2, b)
                assert all(e <= desk.error(m, f, i, 2, b) for m in p.members)


def _R(archive, budget):
    ids = archive.optimizer_ids
    t = ranking_table(archive, [2], lambda d: [budget])
    return ids, rank_matrix(t, ids, [(f, 2, budget) for f in archive.function_ids])


def _exhaustive(R, k):
    return min(int(R[:, list(c)].min(axis=1).sum()) for c in itertools.combinations(range(R.shape[1]), k))


@pytest.mark.parametrize("seed", range(3))
def test_local_search_soundness(seed):
    arch = synthetic_archive(8, seed=seed)
    ids, R = _R(arch, 200)
    cols, val = local_search(R, 4, restarts=5, seed=seed)
    for i in range(4):
        for j in set(range(8)) - set(cols):
            nb = list(cols)
            nb[i] = j
            assert val <= int(R[:, nb].min(axis=1).sum())
    # restarts >= C(8, 4) enumerate every start
    assert local_search(R, 4, restarts=70, seed=seed)[1] == _exhaustive(R, 4)


def test_dominant_member_always_included():
    rng = np.random.default_rng(1)
    means = {}
    for f in range(1, 8):
        m = {o: 1.0 + rng.random() for o in "BCDEFG"}
        m["A"] = 0.5  # strictly best everywhere
        means[f] = m
    t = _table(means)
    ids = sorted("ABCDEFG")
    R = rank_matrix(t, ids, [(f, 2, 200) for f in range(1, 8)])
    for s in range(10):
        cols, _ = local_search(R, 3, restarts=1, seed=s)
        assert 0 in cols


def test_budget_awareness_inequality():
    for seed in range(5):
        arch = synthetic_archive(7, seed=100 + seed)
        for b, b2 in ((100, 200), (200, 100), (150, 60)):
            pb = build_portfolio(arch, [2], b, 4, restarts=35, seed=seed)
            pb2 = build_portfolio(arch, [2], b2, 4, restarts=35, seed=seed)
            t = ranking_table(arch, [2], lambda d: [b])
            fs = arch.function_ids
            assert portfolio_objective(pb.members, t, fs, [2], b) <= portfolio_objective(
                pb2.members, t, fs, [2], b)


def test_crafted_closer_and_sprinter(crafted):
    a0 = build_portfolio(crafted, [2], 200, 4, seed=0)
    a50 = build_portfolio(crafted, [2], 100, 4, seed=0)
    assert "CL" in a0 and "CL" not in a50
    assert "SP" in a50 and "SP" not in a0
    # enumeration oracle on the same rankings
    for b, p in ((200, a0), (100, a50)):
        ids, R = _R(crafted, b)
        assert _exhaustive(R, 4) == int(R[:, [ids.index(m) for m in p.members]].min(axis=1).sum())


def test_too_few_optimizers():
    arch = synthetic_archive(3, seed=0, functions=(1, 2))
    with pytest.raises(ValueError):
        build_portfolio(arch, [2], 200, 4)


def test_file_roundtrip(tmp_path):
    ps = [Portfolio(("cs", "es_s25", "nm", "rs"), 200, portfolio_label(0)),
          Portfolio(("cs", "es_s25", "nm", "qs"), 100, portfolio_label(50))]  # fmt: skip
    p = tmp_path / "p.txt"
    write_portfolios(p, ps)
    assert p.read_text().splitlines()[1] == "A_50, 100, 4, cs, es_s25, nm, qs"
    assert read_portfolios(p) == ps
    p.write_text("A_0, 200, 4, a, b\n")
    with pytest.raises(ValueError):
        read_portfolios(p)
