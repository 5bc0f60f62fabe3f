import filecmp

import numpy as np
import pytest

from asportfolio.archive import write_archive
from asportfolio.suite import get_instance
from asportfolio.zoo import DEFAULT_ZOO, FAMILIES, OptimizerSpec, generate_archive, run_optimizer, zoo_by_id

ZOO = zoo_by_id()


def test_zoo_covers_every_family():
    assert {s.family for s in DEFAULT_ZOO} == set(FAMILIES)
    with pytest.raises(ValueError):
        zoo_by_id(DEFAULT_ZOO + (OptimizerSpec("rs", "random-search"),))
    with pytest.raises(ValueError):
        OptimizerSpec("x", "cma-es")


def test_random_search_length_and_monotone():
    r = run_optimizer(ZOO["rs"], get_instance(1, 1, 2), 100, seed=3)
    assert r.length == 100 and r.values.size == 100
    assert np.all(np.diff(r.values) <= 0)


def test_es_improves_on_sphere():
    inst = get_instance(1, 1, 2)
    r = run_optimizer(ZOO["es_s05"], inst, 400, seed=11)
    assert r.values[-1] - inst.f_opt < r.values[0] - inst.f_opt


@pytest.mark.parametrize("spec", DEFAULT_ZOO, ids=lambda s: s.id)
def test_budget_one_and_determinism(spec):
    inst = get_instance(8, 2, 3)
    assert run_optimizer(spec, inst, 1, seed=5).values.size == 1
    a = run_optimizer(spec, inst, 300, seed=5)
    assert a == run_optimizer(spec, inst, 300, seed=5)
    assert 1 <= a.length <= 300
    assert np.all(np.diff(a.values) <= 0)
    # values are actual evaluations: never below the optimum
    assert a.values[-1] >= inst.f_opt


def test_desk_archive_counts_and_budget(desk):
    assert len(desk) == 6 * 24 * 5
    for r in desk:
        r.validate()
        assert r.length <= 100 * r.dim


def test_generate_byte_identical(tmp_path):
    kw = dict(function_ids=(1, 3, 20), dims=(2, 3), master_seed=42)
    write_archive(tmp_path / "a.csv", generate_archive(**kw))
    write_archive(tmp_path / "b.csv", generate_archive(**kw))
    assert filecmp.cmp(tmp_path / "a.csv", tmp_path / "b.csv", shallow=False)


def test_parallel_merge_matches_serial():
    kw = dict(function_ids=(2, 9), dims=(2,), trials=2, master_seed=7)
    assert generate_archive(jobs=2, **kw) == generate_archive(jobs=1, **kw)


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        generate_archive(specs=(), dims=(2,))
