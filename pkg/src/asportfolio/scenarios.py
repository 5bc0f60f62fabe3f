"""Seeded synthetic archives for tests and the acceptance suite.

``crafted_archive`` builds the sprinter/closer scenario: "SP" is best around
50n and then stagnates, "CL" is poor at 50n and best at 100n, and four
niche specialists S1..S4 are excellent on their own function groups and
useless elsewhere. ``synthetic_archive`` draws random monotone curves.
Both store values as f_opt + error so that archive errors are the errors
designed here (up to one rounding of the addition).
"""

from __future__ import annotations

import numpy as np

from ._seeding import derive_seed
from .archive import INSTANCES, Archive, RunRecord
from .sample import MAX_FE_MULTIPLIER
from .suite import FUNCTION_IDS, get_instance

NICHES = {"S1": range(1, 6), "S2": range(6, 10), "S3": range(10, 15), "S4": range(15, 20)}
CRAFTED_IDS = ("CL", "S1", "S2", "S3", "S4", "SP")
# functions on which every optimizer but the sprinter ends exactly at the optimum
SOLVED_AT_FULL = (1, 5)


def _loglinear(budgets, anchors):
    """Piecewise log-linear error curve through (budget, error) anchors."""
    b, e = zip(*anchors)
    return 10.0 ** np.interp(budgets, b, np.log10(e))


def _record(opt, fid, iid, dim, trial, errors):
    f_opt = get_instance(fid, iid, dim).f_opt
    values = np.minimum.accumulate(f_opt + errors)
    return RunRecord.from_values(opt, fid, iid, dim, trial, values)


def crafted_curve(opt, fid, dim, jitter=1.0):
    B = MAX_FE_MULTIPLIER * dim
    half = B // 2
    budgets = np.arange(1, B + 1)
    start = 1e2
    if opt == "SP":
        anchors = [(1, start), (half, 1e-3), (B, 1e-3)]
    elif opt == "CL":
        anchors = [(1, start), (half, 1e1), (B, 1e-6)]
    elif fid in NICHES[opt]:
        anchors = [(1, start), (half, 5e-4), (B, 1e-8)]
    else:
        anchors = [(1, start), (B, start)]
    e = _loglinear(budgets, anchors) * jitter
    if opt != "SP" and fid in SOLVED_AT_FULL:
        e[-1] = 0.0
    return e


def crafted_archive(dim=2, seed=0, functions=FUNCTION_IDS, instances=INSTANCES, trials=1):
    """The sprinter/closer/specialist archive (6 optimizers, budget 100n)."""
    records = []
    for opt in CRAFTED_IDS:
        for fid in functions:
            for iid in instances:
                for t in range(1, trials + 1):
                    rng = np.random.default_rng(derive_seed(seed, "crafted", opt, fid, iid, dim, t))
                    jitter = 10.0 ** (0.1 * rng.uniform(-1.0, 1.0))
                    records.append(_record(opt, fid, iid, dim, t, crafted_curve(opt, fid, dim, jitter)))
    return Archive(records)


def synthetic_archive(n_optimizers=8, seed=0, dims=(2,), functions=FUNCTION_IDS,
                      instances=INSTANCES, trials=1, solved_rate=0.1):  # fmt: skip
    """Random monotone curves: log-error falls from ~U(1, 3) to ~U(-8, 1) along a
    power law with exponent ~U(0.3, 3). With probability ``solved_rate`` a
    (optimizer, function) pair ends exactly at the optimum, which creates rank ties."""
    ids = [f"o{j}" for j in range(n_optimizers)]
    records = []
    for dim in dims:
        B = MAX_FE_MULTIPLIER * dim
        frac = np.arange(1, B + 1) / B
        for opt in ids:
            for fid in functions:
                rng = np.random.default_rng(derive_seed(seed, "synthetic", opt, fid, dim))
                a, c = rng.uniform(1.0, 3.0), rng.uniform(-8.0, 1.0)
                p = rng.uniform(0.3, 3.0)
                solved = rng.random() < solved_rate
                for iid in instances:
                    for t in range(1, trials + 1):
                        noise = 0.2 * rng.standard_normal()
                        e = 10.0 ** (a + (c + noise - a) * frac**p)
                        if solved:
                            e[-1] = 0.0
                        records.append(_record(opt, fid, iid, dim, t, e))
    return Archive(records)
