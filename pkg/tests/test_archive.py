import numpy as np
import pytest

from asportfolio.archive import (
    Archive,
    ArchiveFormatError,
    EmptyArchiveError,
    MissingDataError,
    RunRecord,
    best_so_far_error,
    competition_ranks,
    ingest,
    mean_instance_error,
    rank_optimizers,
    ranking_table,
    write_archive,
)
from asportfolio.suite import get_instance


def _rec(values, opt="A", fid=1, iid=1, dim=2, trial=1, ev=None):
    values = np.asarray(values, float)
    ev = np.arange(1, values.size + 1) if ev is None else ev
    return RunRecord(opt, fid, iid, dim, trial, ev, values)


def test_best_so_far_examples():
    r = _rec([5, 3, 3, 2])
    assert best_so_far_error(r, 3, 1.0) == 2.0
    assert best_so_far_error(r, 100, 1.0) == 1.0  # past the end -> last value
    assert best_so_far_error(_rec([4.0, 1.0]), 2, 1.0) == 0.0


def test_sparse_curve_and_missing_prefix():
    r = _rec([9.0, 4.0, 1.0], ev=np.array([3, 10, 40]))
    assert r.value_at(9) == 9.0
    assert r.value_at(10) == 4.0
    assert r.length == 40
    with pytest.raises(MissingDataError):
        r.value_at(2)
    with pytest.raises(ValueError):
        r.value_at(0)


def _flat_archive(errors_by_opt, fid=1, dim=2):
    recs = []
    for opt, errs in errors_by_opt.items():
        for iid, e in zip(range(1, 6), errs):
            f_opt = get_instance(fid, iid, dim).f_opt
            recs.append(_rec([f_opt + e], opt, fid, iid, dim))
    return Archive(recs)


def test_mean_instance_error():
    a = _flat_archive({"A": [1, 2, 3, 4, 5], "Z": [0, 0, 0, 0, 0]})
    assert mean_instance_error(a, "A", 1, 2, 1) == pytest.approx(3.0, abs=1e-12)
    assert mean_instance_error(a, "Z", 1, 2, 1) == 0.0
    partial = a.subset(["A"])
    partial = Archive(r for r in partial if r.instance_id != 4)
    with pytest.raises(MissingDataError, match="instance 4"):
        mean_instance_error(partial, "A", 1, 2, 1)


def test_competition_ranks():
    assert competition_ranks([0.0, 0.0, 1.0]).tolist() == [1, 1, 3]
    assert competition_ranks([3.0, 1.0, 2.0, 1.0]).tolist() == [4, 1, 3, 1]
    rng = np.random.default_rng(0)
    v = rng.random(7)
    assert sorted(competition_ranks(v).tolist()) == list(range(1, 8))


def test_rank_optimizers_tie_convention():
    a = _flat_archive({"A": [0] * 5, "B": [0] * 5, "C": [1] * 5})
    t = rank_optimizers(a, 1, 2, 1)
    assert t.ranks(1, 2, 1) == {"A": 1, "B": 1, "C": 3}
    with pytest.raises(ValueError):
        rank_optimizers(a.subset(["A"]), 1, 2, 1)


def test_desk_means_and_ranks_against_hand_oracle(desk):
    # spreadsheet-style recomputation straight from the stored values
    fid, dim, budget = 7, 2, 150
    table = rank_optimizers(desk, fid, dim, budget)
    means = table.means(fid, dim, budget)
    for o in desk.optimizer_ids:
        tot = 0.0
        for iid in range(1, 6):
            r = desk.record(o, fid, iid, dim)
            k = np.flatnonzero(r.evaluations <= budget)[-1]
            tot += abs(r.values[k] - get_instance(fid, iid, dim).f_opt)
        assert means[o] == pytest.approx(tot / 5, rel=1e-15)
    ranks = table.ranks(fid, dim, budget)
    for o in means:
        assert ranks[o] == 1 + sum(means[p] < means[o] for p in means)


def test_ranks_follow_mean_order_at_every_budget(desk):
    t = ranking_table(desk, [2], lambda d: [1, 20, 100, 150, 200], [1, 8, 15, 24])
    for key in t.keys():
        m, r = t.means(*key), t.ranks(*key)
        for a in m:
            for b in m:
                if m[a] < m[b]:
                    assert r[a] < r[b]
                elif m[a] == m[b]:
                    assert r[a] == r[b]


def test_roundtrip(desk, tmp_path):
    p = tmp_path / "a.csv"
    write_archive(p, desk)
    assert ingest(p) == desk


def test_ingest_rejects_decreasing_index(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text(
        "optimizer_id,function_id,instance_id,dim,trial,evaluation_index,best_so_far_value\n"
        "A,1,1,2,1,1,5.0\n"
        "A,1,1,2,1,3,4.0\n"
        "A,1,1,2,1,2,3.0\n"
    )
    with pytest.raises(ArchiveFormatError) as exc:
        ingest(p)
    assert exc.value.line == 4


def test_ingest_rejects_increasing_value(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text(
        "optimizer_id,function_id,instance_id,dim,trial,evaluation_index,best_so_far_value\n"
        "A,1,1,2,1,1,5.0\nA,1,1,2,1,2,6.0\n"
    )
    with pytest.raises(ArchiveFormatError, match=r"\('A', 1, 1, 2, 1\)"):
        ingest(p)


def test_ingest_malformed_and_empty(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(EmptyArchiveError):
        ingest(p)
    p.write_text("optimizer_id,function_id,instance_id,dim,trial,evaluation_index,best_so_far_value\n")
    with pytest.raises(EmptyArchiveError):
        ingest(p)
    p.write_text(
        "optimizer_id,function_id,instance_id,dim,trial,evaluation_index,best_so_far_value\n"
        "A,1,x,2,1,1,5.0\n"
    )
    with pytest.raises(ArchiveFormatError) as exc:
        ingest(p)
    assert exc.value.line == 2


def test_rank_export(tmp_path):
    a = _flat_archive({"A": [0] * 5, "B": [0] * 5, "C": [1] * 5})
    p = tmp_path / "r.csv"
    rank_optimizers(a, 1, 2, 1).write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "function_id,dim,budget,optimizer_id,mean_error,rank"
    assert [ln.rsplit(",", 1)[1] for ln in lines[1:]] == ["1", "1", "3"]
