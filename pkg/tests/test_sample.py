import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asportfolio.sample import (BudgetExhausted, BudgetLedger, Sample, draw_sample,
                                latin_hypercube, read_sample_csv, write_sample_csv)
from asportfolio.suite import get_instance


def bins(X, count):
    return np.minimum(np.floor((X + 5.0) / 10.0 * count), count - 1).astype(int)


def test_lhs_four_bins():
    X = latin_hypercube(1, 4, 123)
    assert sorted(bins(X, 4)[:, 0]) == [0, 1, 2, 3]
    edges = [(-5, -2.5), (-2.5, 0), (0, 2.5), (2.5, 5)]
    for lo, hi in edges:
        assert np.sum((X[:, 0] >= lo) & (X[:, 0] < hi if hi < 5 else X[:, 0] <= hi)) == 1


def test_lhs_determinism_and_histogram():
    assert np.array_equal(latin_hypercube(2, 50, 7), latin_hypercube(2, 50, 7))
    X = latin_hypercube(3, 30, 11)
    for j in range(3):
        counts = np.histogram(X[:, j], bins=30, range=(-5, 5))[0]
        assert np.all(counts == 1)
        assert list(np.sort(bins(X, 30)[:, j])) == list(range(30))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 300), st.integers(0, 2**63 - 1))
def test_lhs_bin_property(dim, count, seed):
    X = latin_hypercube(dim, count, seed)
    assert X.shape == (count, dim)
    assert np.all((X >= -5) & (X <= 5))
    B = bins(X, count)
    for j in range(dim):
        assert np.array_equal(np.sort(B[:, j]), np.arange(count))


def test_draw_sample_ledger():
    inst = get_instance(1, 1, 2)
    ledger = BudgetLedger.for_dim(2)
    s = draw_sample(inst, 20, 5, ledger)
    assert ledger.spent_sampling == 20 and ledger.remaining == 180
    assert s.evaluations_used == 20 and s.points.shape == (20, 2)
    with pytest.raises(ValueError):
        draw_sample(inst, 0, 5, BudgetLedger.for_dim(2))
    with pytest.raises(BudgetExhausted):
        draw_sample(inst, 181, 5, ledger)
    assert ledger.spent_sampling == 20


def test_draw_sample_values_bounded_below():
    inst = get_instance(1, 2, 3)
    s = draw_sample(inst, 50, 9, BudgetLedger.for_dim(3))
    assert s.values.min() >= inst.f_opt
    assert np.all(np.abs(s.points) <= 5)


def test_ledger_invariants():
    led = BudgetLedger(200)
    led.charge_sampling(50)
    led.charge_optimizer(150)
    assert led.spent == 200
    with pytest.raises(BudgetExhausted):
        led.charge_optimizer(1)
    with pytest.raises(ValueError):
        BudgetLedger(10).charge_sampling(-1)


def test_sample_csv_roundtrip(tmp_path):
    inst = get_instance(7, 2, 3)
    s = draw_sample(inst, 30, 4, BudgetLedger.for_dim(3))
    p = tmp_path / "s.csv"
    write_sample_csv(p, s)
    back = read_sample_csv(p)
    assert back == s and back.meta["function_id"] == 7 and back.meta["seed"] == 4


def test_sample_shape_checks():
    with pytest.raises(ValueError):
        Sample(np.zeros((3, 2)), np.zeros(2), 3)
