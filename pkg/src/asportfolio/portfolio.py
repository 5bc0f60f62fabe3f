"""Portfolio construction by local-search subset selection, SBS and VBS.

A portfolio built "budget-aware" for sample size s uses rankings at budget
100n - s, the evaluations actually left for the selected optimizer; the
budget-ignorant portfolio uses rankings at 100n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._seeding import derive_seed
from .archive import MissingDataError, RankingTable, rank_optimizers

OBJECTIVES = ("min_rank", "rank_sum")


@dataclass(frozen=True)
class Portfolio:
    members: tuple
    build_budget: int
    label: str = ""

    def __post_init__(self):
        members = tuple(self.members)
        if len(set(members)) != len(members):
            raise ValueError(f"portfolio members must be distinct: {members}")
        object.__setattr__(self, "members", members)

    @property
    def k(self) -> int:
        return len(self.members)

    def __contains__(self, optimizer_id):
        return optimizer_id in self.members


def portfolio_label(s_multiplier: int) -> str:
    """'A_0' for the budget-ignorant build, 'A_10' for s = 10n, and so on."""
    return f"A_{int(s_multiplier)}"


def rank_matrix(rankings: RankingTable, optimizer_ids, problems):
    """(len(problems), len(optimizer_ids)) int array; problems are (fid, dim, budget)."""
    R = np.empty((len(problems), len(optimizer_ids)), dtype=np.int64)
    for p, key in enumerate(problems):
        if key not in rankings:
            raise MissingDataError(f"no ranking for {key}")
        ranks = rankings.ranks(*key)
        for j, o in enumerate(optimizer_ids):
            if o not in ranks:
                raise MissingDataError(f"optimizer {o!r} not ranked for {key}")
            R[p, j] = ranks[o]
    return R


def _budget_fn(budget_for_dim):
    if callable(budget_for_dim):
        return budget_for_dim
    return lambda d, b=int(budget_for_dim): b


def _score(R, cols, objective):
    sub = R[:, list(cols)]
    if objective == "min_rank":
        return int(sub.min(axis=1).sum())
    return int(sub.sum())


def portfolio_objective(members, rankings: RankingTable, functions, dims, budget_for_dim,
                        objective="min_rank") -> int:  # fmt: skip
    """Sum over (function, dim) of the best member rank (or of all member ranks).

    ``budget_for_dim`` is an int or a callable dim -> ranking budget.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    members = list(members)
    bfd = _budget_fn(budget_for_dim)
    problems = [(f, d, bfd(d)) for d in dims for f in functions]
    R = rank_matrix(rankings, members, problems)
    return _score(R, range(len(members)), objective)


def local_search(R, k, restarts=20, iterations=1000, seed=0, objective="min_rank"):
    """First-improvement swap search over k-subsets of the columns of R.

    Returns (best column tuple, its objective). Starts are seeded random
    k-subsets, or every k-subset when there are no more than ``restarts``.
    Each step scans the swap neighbourhood in a freshly shuffled order and
    takes the first strictly better neighbour; a restart ends at a local
    optimum or after ``iterations`` steps. Ties between restarts go to the
    lowest restart index.
    """
    m = R.shape[1]
    if k > m or k < 1:
        raise ValueError(f"need 1 <= k <= number of optimizers ({m}), got k={k}")
    if math.comb(m, k) <= restarts:
        starts = [tuple(c) for c in itertools.combinations(range(m), k)]
    else:
        starts = []
        for r in range(restarts):
            rng = np.random.default_rng(derive_seed(seed, "start", r))
            starts.append(tuple(sorted(rng.choice(m, size=k, replace=False).tolist())))
    best, best_val = None, None
    for r, start in enumerate(starts):
        rng = np.random.default_rng(derive_seed(seed, "walk", r))
        cur = list(start)
        val = _score(R, cur, objective)
        for _ in range(iterations):
            outside = [j for j in range(m) if j not in cur]
            moves = [(i, j) for i in range(k) for j in outside]
            improved = False
            for idx in rng.permutation(len(moves)):
                i, j = moves[idx]
                cand = cur.copy()
                cand[i] = j
                v = _score(R, cand, objective)
                if v < val:
                    cur, val, improved = cand, v, True
                    break
            if not improved:
                break
        if best_val is None or val < best_val:
            best, best_val = tuple(sorted(cur)), val
    return best, best_val


def build_portfolio(archive, dims, budget_for_dim, k=4, restarts=20, iterations=1000, seed=0,
                    functions=None, objective="min_rank", label="", rankings=None,
                    trial=1) -> Portfolio:  # fmt: skip
    """Best k-subset of the archive's optimizers under ``portfolio_objective``.

    ``budget_for_dim`` is either an int (same budget everywhere) or a
    callable dim -> budget. Rankings are computed over all archived
    optimizers unless a precomputed ``rankings`` table is given.
    """
    ids = archive.optimizer_ids
    if len(ids) < k:
        raise ValueError(f"need at least k={k} optimizers, archive has {len(ids)}")
    bfd = _budget_fn(budget_for_dim)
    functions = archive.function_ids if functions is None else list(functions)
    problems = [(f, d, bfd(d)) for d in dims for f in functions]
    if rankings is None:
        rankings = RankingTable()
        for f, d, b in problems:
            rank_optimizers(archive, f, d, b, ids, trial, rankings)
    R = rank_matrix(rankings, ids, problems)
    cols, _ = local_search(R, k, restarts, iterations, seed, objective)
    # portfolios are normally built per dimension; with several dims the
    # recorded budget is that of the first
    return Portfolio(tuple(ids[c] for c in cols), bfd(dims[0]), label)


def single_best_solver(portfolio, rankings: RankingTable, functions, dims, budget_for_dim) -> str:
    """Member with the smallest rank sum; ties go to the smallest id."""
    bfd = _budget_fn(budget_for_dim)
    problems = [(f, d, bfd(d)) for d in dims for f in functions]
    members = sorted(portfolio.members)
    sums = rank_matrix(rankings, members, problems).sum(axis=0)
    return members[int(np.argmin(sums))]


def virtual_best_solver(portfolio, archive, function_id, instance_id, dim, budget, trial=1):
    """(member, error) with the smallest best-so-far error; ties -> smallest id."""
    best = None
    for o in sorted(portfolio.members):
        e = archive.error(o, function_id, instance_id, dim, budget, trial)
        if best is None or e < best[1]:
            best = (o, e)
    return best


# ---------------------------------------------------------------------------
# portfolio file: "label, build_budget, k, member1, ..., memberk" per line


def write_portfolios(path, portfolios) -> None:
    with open(path, "w") as fh:
        for p in portfolios:
            fh.write(", ".join([p.label, str(p.build_budget), str(p.k), *p.members]) + "\n")


def read_portfolios(path):
    out = []
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [t.strip() for t in line.split(",")]
            try:
                label, budget, k = parts[0], int(parts[1]), int(parts[2])
            except (IndexError, ValueError):
                raise ValueError(f"{path}:{n}: malformed portfolio line") from None
            members = tuple(parts[3:])
            if len(members) != k:
                raise ValueError(f"{path}:{n}: expected {k} members, got {len(members)}")
            out.append(Portfolio(members, budget, label))
    return out
