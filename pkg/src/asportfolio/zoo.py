"""A small seeded optimizer zoo that fills the run archive.

Each optimizer sees the objective only through a counting evaluator; the
best-so-far value after every evaluation becomes the RunRecord curve. When
the budget is spent the evaluator raises ``_Exhausted`` and the run ends;
internal termination (a collapsed simplex, a vanishing step) ends it early
without padding.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._seeding import derive_seed
from .archive import Archive, RunRecord
from .sample import MAX_FE_MULTIPLIER
from .suite import FUNCTION_IDS, LOWER, UPPER, evaluate, evaluate_batch, get_instance

FAMILIES = (
    "random-search",
    "es-one-plus-one",
    "nelder-mead",
    "coordinate-step",
    "quadratic-surrogate",
)


@dataclass(frozen=True)
class OptimizerSpec:
    id: str
    family: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown optimizer family {self.family!r}")

    def hp(self, name, default):
        return self.hyperparameters.get(name, default)


DEFAULT_ZOO = (
    OptimizerSpec("rs", "random-search"),
    OptimizerSpec("es_s05", "es-one-plus-one", {"sigma0": 0.5}),
    OptimizerSpec("es_s25", "es-one-plus-one", {"sigma0": 2.5}),
    OptimizerSpec("nm", "nelder-mead", {"step": 1.0}),
    OptimizerSpec("cs", "coordinate-step", {"step": 2.0}),
    OptimizerSpec("qs", "quadratic-surrogate", {"sigma0": 1.0}),
)


def zoo_by_id(specs=DEFAULT_ZOO):
    out = {}
    for s in specs:
        if s.id in out:
            raise ValueError(f"duplicate optimizer id {s.id!r}")
        out[s.id] = s
    return out


class _Exhausted(Exception):
    pass


class _Counter:
    """Counts evaluations and records the best-so-far trace."""

    def __init__(self, instance, budget):
        self.instance = instance
        self.budget = budget
        self.best = math.inf
        self.trace = []

    def __call__(self, x):
        if len(self.trace) >= self.budget:
            raise _Exhausted
        v = evaluate(self.instance, x)
        if v < self.best:
            self.best = v
        self.trace.append(self.best)
        return v


def _clip(x):
    return np.clip(x, LOWER, UPPER)


def _random_search(f, n, rng, spec):
    # one batch is equivalent to point-by-point evaluation and much cheaper
    X = rng.uniform(LOWER, UPPER, (f.budget, n))
    vals = evaluate_batch(f.instance, X)
    f.trace = np.minimum.accumulate(vals).tolist()


def _es(f, n, rng, spec):
    sigma = float(spec.hp("sigma0", 1.0))
    up, down = math.exp(1.0 / 3.0), math.exp(-1.0 / 12.0)  # 1/5 success rule
    x = rng.uniform(-4.0, 4.0, n)
    fx = f(x)
    while True:
        y = _clip(x + sigma * rng.standard_normal(n))
        fy = f(y)
        if fy <= fx:
            x, fx = y, fy
            sigma *= up
        else:
            sigma *= down
        sigma = min(max(sigma, 1e-12), UPPER - LOWER)


def _nelder_mead(f, n, rng, spec, tol=1e-10):
    step = float(spec.hp("step", 1.0))
    x0 = rng.uniform(-4.0, 4.0, n)
    simplex = [x0] + [_clip(x0 + step * e) for e in np.eye(n)]
    vals = [f(p) for p in simplex]
    while True:
        order = np.argsort(vals, kind="stable")
        simplex = [simplex[i] for i in order]
        vals = [vals[i] for i in order]
        spread = max(np.max(np.abs(p - simplex[0])) for p in simplex[1:])
        if spread < tol:
            return  # collapsed simplex: internal termination
        c = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = c + (c - worst)
        fr = f(xr)
        if fr < vals[0]:
            xe = c + 2.0 * (c - worst)
            fe = f(xe)
            simplex[-1], vals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < vals[-2]:
            simplex[-1], vals[-1] = xr, fr
        else:
            if fr < vals[-1]:
                xc = c + 0.5 * (xr - c)
            else:
                xc = c + 0.5 * (worst - c)
            fc = f(xc)
            if fc < min(fr, vals[-1]):
                simplex[-1], vals[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    vals[i] = f(simplex[i])


def _coordinate_step(f, n, rng, spec, tol=1e-12):
    step = float(spec.hp("step", 2.0))
    x = rng.uniform(-4.0, 4.0, n)
    fx = f(x)
    while step >= tol:
        improved = False
        for i in range(n):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] = min(max(y[i] + sign * step, LOWER), UPPER)
                if y[i] == x[i]:
                    continue
                fy = f(y)
                if fy < fx:
                    x, fx = y, fy
                    improved = True
                    break
        if not improved:
            step *= 0.5


def _quadratic_surrogate(f, n, rng, spec):
    """Separable quadratic model on the best points, perturbed by an adaptive step."""
    sigma = float(spec.hp("sigma0", 1.0))
    n_coef = 2 * n + 1
    X = list(rng.uniform(LOWER, UPPER, (n_coef + 1, n)))
    Y = [f(x) for x in X]
    while True:
        Xa, Ya = np.array(X), np.array(Y)
        keep = np.argsort(Ya, kind="stable")[: 4 * n_coef]
        Xk, Yk = Xa[keep], Ya[keep]
        best = Xk[0]
        A = np.hstack([np.ones((Xk.shape[0], 1)), Xk, Xk * Xk])
        coef, *_ = np.linalg.lstsq(A, Yk, rcond=None)
        b, c = coef[1 : n + 1], coef[n + 1 :]
        target = np.where(c > 1e-12, -b / (2.0 * np.where(c > 1e-12, c, 1.0)), best)
        y = _clip(target + sigma * rng.standard_normal(n))
        fy = f(y)
        if fy < Yk[0]:
            sigma = min(sigma * 1.5, UPPER - LOWER)
        else:
            sigma = max(sigma * 0.7, 1e-10)
        X.append(y)
        Y.append(fy)


_RUNNERS = {
    "random-search": _random_search,
    "es-one-plus-one": _es,
    "nelder-mead": _nelder_mead,
    "coordinate-step": _coordinate_step,
    "quadratic-surrogate": _quadratic_surrogate,
}


def run_seed(master_seed, spec_id, function_id, instance_id, dim, trial) -> int:
    return derive_seed(master_seed, "run", spec_id, function_id, instance_id, dim, trial)


def run_optimizer(spec: OptimizerSpec, instance, budget: int, seed: int, trial: int = 1) -> RunRecord:
    """Run ``spec`` on ``instance`` for at most ``budget`` evaluations."""
    budget = int(budget)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    f = _Counter(instance, budget)
    rng = np.random.default_rng(seed)
    try:
        _RUNNERS[spec.family](f, instance.dim, rng, spec)
    except _Exhausted:
        pass
    return RunRecord.from_values(
        spec.id, instance.function_id, instance.instance_id, instance.dim, trial, f.trace
    )


def _job(args):
    spec, fid, iid, dim, trial, budget, master_seed = args
    inst = get_instance(fid, iid, dim)
    return run_optimizer(spec, inst, budget, run_seed(master_seed, spec.id, fid, iid, dim, trial), trial)


def generate_archive(
    specs=DEFAULT_ZOO,
    function_ids=FUNCTION_IDS,
    dims=(2,),
    trials=1,
    master_seed=0,
    instances=(1, 2, 3, 4, 5),
    budget_multiplier=MAX_FE_MULTIPLIER,
    jobs=1,
) -> Archive:
    """Every (spec, function, instance, dim, trial) run with budget ``multiplier * dim``."""
    specs = list(specs)
    if not specs or not function_ids:
        raise ValueError("need at least one optimizer and one function")
    zoo_by_id(specs)
    work = [
        (s, fid, iid, dim, t, budget_multiplier * dim, master_seed)
        for s in specs
        for dim in dims
        for fid in function_ids
        for iid in instances
        for t in range(1, trials + 1)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_job, work, chunksize=16))
    else:
        records = [_job(w) for w in work]
    return Archive(records)
