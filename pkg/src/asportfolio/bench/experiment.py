"""Cross-validated algorithm-selection experiments on an archive.

The sample of s evaluations is re-drawn for every trial; the selected
optimizer's performance is looked up in the archive at 100n - s, the budget
it actually has left. Every stream is keyed through ``derive_seed`` so the
results do not depend on job order or on the number of worker processes.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .._seeding import derive_seed
from ..archive import INSTANCES, MissingDataError, ranking_table
from ..ela import FEATURE_CLASSES, compute_features, feature_names
from ..portfolio import Portfolio, single_best_solver
from ..sample import MAX_FE_MULTIPLIER, BudgetLedger, draw_sample
from ..selector import train_selector_matrix
from ..suite import FUNCTION_IDS, get_instance
from .folds import make_folds

TRIALS = 31


@dataclass(frozen=True)
class TrialResult:
    system: str
    portfolio: str
    scheme: str
    dim: int
    s: int  # sample-size multiplier: the sample has s * dim points
    trial: int
    fold: int
    function_id: int
    instance_id: int
    selected: str
    error: float  # selected member at 100n - s
    vbs_id: str
    vbs_error: float
    sbs_id: str
    sbs_error: float
    selected_error_full: float  # selected member at 100n
    vbs_id_full: str
    vbs_error_full: float
    sampling_evals: int
    optimizer_evals: int

    @property
    def sort_key(self):
        return (self.scheme, self.dim, self.s, self.system, self.trial,
                self.function_id, self.instance_id)  # fmt: skip


RUN_COLUMNS = tuple(f.name for f in fields(TrialResult))


def system_label(portfolio: Portfolio, s_mult: int) -> str:
    return f"{portfolio.label}@s{int(s_mult)}"


def sample_seed(master_seed, function_id, instance_id, dim, s_mult, trial) -> int:
    return derive_seed(master_seed, "sample", function_id, instance_id, dim, s_mult, trial)


def archive_trial(archive_trials, trial) -> int:
    """Archived trial used for experiment trial t (cycled when the archive has fewer)."""
    return archive_trials[(trial - 1) % len(archive_trials)]


# ---------------------------------------------------------------------------
# features


def _feature_job(args):
    fid, iid, dim, s_mult, trial, master_seed, classes = args
    seed = sample_seed(master_seed, fid, iid, dim, s_mult, trial)
    ledger = BudgetLedger.for_dim(dim)
    sample = draw_sample(get_instance(fid, iid, dim), s_mult * dim, seed, ledger)
    return (fid, iid, dim, s_mult * dim, seed), compute_features(sample, classes, seed)


def feature_table(dims, s_schedule, trials=TRIALS, master_seed=0, functions=FUNCTION_IDS,
                  instances=INSTANCES, enabled_classes=FEATURE_CLASSES, jobs=1):  # fmt: skip
    """Feature vectors for every (instance, s, trial): dict key -> FeatureVector.

    Keys are (function_id, instance_id, dim, sample size, sample seed), the
    feature-cache key columns.
    """
    work = [(f, i, d, sm, t, master_seed, tuple(enabled_classes))
            for d in dims for sm in s_schedule for t in range(1, trials + 1)
            for f in functions for i in instances]  # fmt: skip
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_feature_job, work, chunksize=32))
    else:
        out = [_feature_job(w) for w in work]
    return dict(sorted(out))


# ---------------------------------------------------------------------------
# experiment


def _check_coverage(archive, members, functions, instances, dim, trials):
    missing = []
    for o in members:
        for f in functions:
            for i in instances:
                for t in trials:
                    try:
                        archive.record(o, f, i, dim, t)
                    except MissingDataError:
                        missing.append((o, f, i, dim, t))
    if missing:
        raise MissingDataError(f"archive lacks {len(missing)} runs, e.g. {missing[:3]}")


def _trial_job(ctx):
    (plan, trial, keys, X, names, portfolios, sbs, E, Efull, lengths, dim, s_mult,
     master_seed, target, forest_kwargs, eval_budget) = ctx  # fmt: skip
    out, trace = [], []
    pos = {k: j for j, k in enumerate(keys)}
    for fold_idx, fold in enumerate(plan.folds):
        tr = np.array([pos[k] for k in fold.train])
        te = np.array([pos[k] for k in fold.test])
        trace.append((plan.scheme, dim, s_mult, trial, fold_idx, fold.train, fold.test))
        seed = derive_seed(master_seed, "model", dim, s_mult, plan.scheme, trial, fold_idx)
        cache = {}
        for p in portfolios:
            members = sorted(p.members)
            sel = train_selector_matrix(p, X[tr], names, {m: E[m][tr] for m in members}, seed,
                                        target, forest_kwargs, cache)  # fmt: skip
            P = sel.predict_matrix(sel.impute_matrix(X[te], names))
            label = system_label(p, s_mult)
            for row, j in enumerate(te):
                fid, iid = keys[j]
                pick = members[int(np.argmin(P[row]))]  # first minimum = smallest id
                ev = [E[m][j] for m in members]
                vb = int(np.argmin(ev))
                fu = [Efull[m][j] for m in members]
                vf = int(np.argmin(fu))
                sb = sbs[p.label]
                spent = min(eval_budget, lengths[pick][j])
                out.append(TrialResult(
                    label, p.label, plan.scheme, dim, s_mult, trial, fold_idx, fid, iid,
                    pick, float(E[pick][j]), members[vb], float(ev[vb]), sb, float(E[sb][j]),
                    float(Efull[pick][j]), members[vf], float(fu[vf]), s_mult * dim, int(spent),
                ))  # fmt: skip
    return out, trace


def run_experiment(archive, portfolios, s_mult, dim, scheme, trials=TRIALS, master_seed=0,
                   features=None, functions=FUNCTION_IDS, instances=INSTANCES,
                   enabled_classes=FEATURE_CLASSES, target="log10", forest_kwargs=None,
                   jobs=1, trace=None, strict_features=False):  # fmt: skip
    """Run the AS systems of ``portfolios`` (one or several) for one (s, dim, scheme).

    Returns the TrialResults sorted by key. ``features`` maps feature-cache
    keys to FeatureVectors; missing keys are computed on the fly unless
    ``strict_features`` is set, in which case they raise MissingDataError. When
    ``trace`` is a list, one (scheme, dim, s, trial, fold, train keys, test
    keys) tuple is appended per trained fold, for leakage audits.
    """
    if isinstance(portfolios, Portfolio):
        portfolios = [portfolios]
    portfolios = list(portfolios)
    labels = [p.label for p in portfolios]
    if len(set(labels)) != len(labels):
        raise ValueError(f"portfolio labels must be distinct: {labels}")
    max_fe = MAX_FE_MULTIPLIER * dim
    eval_budget = max_fe - s_mult * dim
    if eval_budget < 1:
        raise ValueError(f"s = {s_mult}n leaves no budget for the optimizer")
    members = sorted({m for p in portfolios for m in p.members})
    atrials = archive.trials
    used = sorted({archive_trial(atrials, t) for t in range(1, trials + 1)})
    _check_coverage(archive, members, functions, instances, dim, used)

    rankings = ranking_table(archive, [dim], lambda d: sorted({p.build_budget for p in portfolios}),
                             list(functions), archive.optimizer_ids, atrials[0])  # fmt: skip
    sbs = {p.label: single_best_solver(p, rankings, functions, [dim], p.build_budget)
           for p in portfolios}  # fmt: skip

    keys = [(f, i) for f in functions for i in instances]
    plan = make_folds(scheme, functions, instances, dim)
    plan.validate()
    names = feature_names(enabled_classes)
    features = {} if features is None else features
    jobs_ctx = []
    for t in range(1, trials + 1):
        at = archive_trial(atrials, t)
        E = {m: np.array([archive.error(m, f, i, dim, eval_budget, at) for f, i in keys])
             for m in members}  # fmt: skip
        Efull = {m: np.array([archive.error(m, f, i, dim, max_fe, at) for f, i in keys])
                 for m in members}  # fmt: skip
        lengths = {m: [archive.record(m, f, i, dim, at).length for f, i in keys] for m in members}
        rows = []
        for f, i in keys:
            key = (f, i, dim, s_mult * dim, sample_seed(master_seed, f, i, dim, s_mult, t))
            if key not in features:
                if strict_features:
                    raise MissingDataError(f"feature cache has no row for {key}")
                features[key] = _feature_job((f, i, dim, s_mult, t, master_seed,
                                              tuple(enabled_classes)))[1]  # fmt: skip
            rows.append(features[key].to_array(names))
        X = np.array(rows)
        jobs_ctx.append((plan, t, keys, X, names, portfolios, sbs, E, Efull, lengths, dim,
                         s_mult, master_seed, target, forest_kwargs, eval_budget))  # fmt: skip
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_trial_job, jobs_ctx))
    else:
        parts = [_trial_job(c) for c in jobs_ctx]
    results = [r for out, _ in parts for r in out]
    if trace is not None:
        for _, tr in parts:
            trace.extend(tr)
    return sorted(results, key=lambda r: r.sort_key)


# ---------------------------------------------------------------------------
# runs.csv


def write_runs(path, results) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        for r in sorted(results, key=lambda r: r.sort_key):
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in astuple(r)])


def read_runs(path):
    types = [f.type for f in fields(TrialResult)]
    conv = {"int": int, "float": float, "str": str}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = tuple(next(r, ()))
        if header != RUN_COLUMNS:
            raise ValueError(f"{path}: not a runs file (header {header[:3]}...)")
        for row in r:
            out.append(TrialResult(*(conv[t](v) for t, v in zip(types, row))))
    return out
