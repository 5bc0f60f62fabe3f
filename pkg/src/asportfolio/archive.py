"""Run trajectories, fixed-budget errors and per-function optimizer rankings."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .suite import get_instance

COLUMNS = (
    "optimizer_id",
    "function_id",
    "instance_id",
    "dim",
    "trial",
    "evaluation_index",
    "best_so_far_value",
)
RANKING_COLUMNS = ("function_id", "dim", "budget", "optimizer_id", "mean_error", "rank")
INSTANCES = (1, 2, 3, 4, 5)


class MissingDataError(LookupError):
    """A query needs a record (or a budget) the archive does not have."""


class ArchiveFormatError(ValueError):
    """Malformed archive file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class EmptyArchiveError(ArchiveFormatError):
    pass


@dataclass(frozen=True, eq=False)
class RunRecord:
    optimizer_id: str
    function_id: int
    instance_id: int
    dim: int
    trial: int
    evaluations: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ev = np.array(self.evaluations, dtype=np.int64).ravel()
        va = np.array(self.values, dtype=float).ravel()
        if ev.shape != va.shape or ev.size == 0:
            raise ValueError(f"{self.run_key}: empty or ragged curve")
        ev.flags.writeable = False
        va.flags.writeable = False
        object.__setattr__(self, "evaluations", ev)
        object.__setattr__(self, "values", va)

    @classmethod
    def from_values(cls, optimizer_id, function_id, instance_id, dim, trial, values):
        """Record whose i-th entry is the best-so-far after i + 1 evaluations."""
        values = np.asarray(values, dtype=float)
        return cls(optimizer_id, function_id, instance_id, dim, trial,
                   np.arange(1, values.size + 1), values)  # fmt: skip

    @property
    def run_key(self):
        return (self.optimizer_id, self.function_id, self.instance_id, self.dim, self.trial)

    @property
    def length(self) -> int:
        """Evaluations actually used (last evaluation index)."""
        return int(self.evaluations[-1])

    def validate(self):
        if self.evaluations[0] < 1 or np.any(np.diff(self.evaluations) <= 0):
            raise ValueError(f"run {self.run_key}: evaluation_index not strictly increasing from 1")
        if np.any(np.diff(self.values) > 0):
            raise ValueError(f"run {self.run_key}: best_so_far_value increases")

    def value_at(self, budget: int) -> float:
        budget = int(budget)
        if budget < 1:
            raise ValueError("budget must be >= 1")
        i = int(np.searchsorted(self.evaluations, budget, side="right")) - 1
        if i < 0:
            raise MissingDataError(
                f"run {self.run_key} has no entry at or before evaluation {budget}"
            )
        return float(self.values[i])

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return NotImplemented
        return (
            self.run_key == other.run_key
            and np.array_equal(self.evaluations, other.evaluations)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def best_so_far_error(record: RunRecord, budget: int, f_opt: float) -> float:
    """|v - f_opt| for the best-so-far value v after ``budget`` evaluations."""
    return abs(record.value_at(budget) - f_opt)


class Archive:
    """Immutable collection of RunRecords keyed by (optimizer, f, instance, dim, trial)."""

    def __init__(self, records=()):
        self._runs = {}
        for r in records:
            if r.run_key in self._runs:
                raise ValueError(f"duplicate run {r.run_key}")
            self._runs[r.run_key] = r
        self._runs = dict(sorted(self._runs.items()))
        self._fopt = {}

    def __len__(self):
        return len(self._runs)

    def __iter__(self):
        return iter(self._runs.values())

    def __eq__(self, other):
        if not isinstance(other, Archive):
            return NotImplemented
        return self._runs.keys() == other._runs.keys() and all(
            self._runs[k] == other._runs[k] for k in self._runs
        )

    __hash__ = None

    def _axis(self, i):
        return sorted({k[i] for k in self._runs})

    @property
    def optimizer_ids(self):
        return self._axis(0)

    @property
    def function_ids(self):
        return self._axis(1)

    @property
    def instance_ids(self):
        return self._axis(2)

    @property
    def dims(self):
        return self._axis(3)

    @property
    def trials(self):
        return self._axis(4)

    def record(self, optimizer_id, function_id, instance_id, dim, trial=1) -> RunRecord:
        key = (optimizer_id, int(function_id), int(instance_id), int(dim), int(trial))
        try:
            return self._runs[key]
        except KeyError:
            raise MissingDataError(f"no run for {key}") from None

    def f_opt(self, function_id, instance_id, dim) -> float:
        key = (function_id, instance_id, dim)
        if key not in self._fopt:
            self._fopt[key] = get_instance(*key).f_opt
        return self._fopt[key]

    def error(self, optimizer_id, function_id, instance_id, dim, budget, trial=1) -> float:
        rec = self.record(optimizer_id, function_id, instance_id, dim, trial)
        return best_so_far_error(rec, budget, self.f_opt(function_id, instance_id, dim))

    def subset(self, optimizer_ids) -> "Archive":
        keep = set(optimizer_ids)
        return Archive(r for r in self if r.optimizer_id in keep)


def mean_instance_error(archive, optimizer_id, function_id, dim, budget, trial=1,
                        instances=INSTANCES) -> float:  # fmt: skip
    """Mean best-so-far error over the instances (default 1..5)."""
    errs = []
    for iid in instances:
        try:
            errs.append(archive.error(optimizer_id, function_id, iid, dim, budget, trial))
        except MissingDataError as exc:
            raise MissingDataError(
                f"{optimizer_id} f{function_id} d{dim}: instance {iid} missing ({exc})"
            ) from None
    return float(np.mean(errs))


def competition_ranks(values) -> np.ndarray:
    """1 + number of strictly smaller values ("1-2-2-4" ranking)."""
    v = np.asarray(values, dtype=float)
    return 1 + np.sum(v[None, :] < v[:, None], axis=1)


class RankingTable:
    """Per (function_id, dim, budget): optimizer -> (mean error, competition rank)."""

    def __init__(self):
        self._rows = {}

    def add(self, function_id, dim, budget, means: dict):
        ids = sorted(means)
        ranks = competition_ranks([means[i] for i in ids])
        self._rows[(int(function_id), int(dim), int(budget))] = {
            i: (float(means[i]), int(r)) for i, r in zip(ids, ranks)
        }

    def keys(self):
        return sorted(self._rows)

    def ranks(self, function_id, dim, budget) -> dict:
        return {k: r for k, (_, r) in self._rows[(function_id, dim, budget)].items()}

    def means(self, function_id, dim, budget) -> dict:
        return {k: m for k, (m, _) in self._rows[(function_id, dim, budget)].items()}

    def __contains__(self, key):
        return tuple(key) in self._rows

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RANKING_COLUMNS)
            for key in self.keys():
                for opt, (m, r) in sorted(self._rows[key].items()):
                    w.writerow([key[0], key[1], key[2], opt, repr(m), r])


def rank_optimizers(archive, function_id, dim, budget, optimizer_ids=None, trial=1,
                    table=None) -> RankingTable:  # fmt: skip
    """Competition ranks of mean instance error (ascending) for one function/dim/budget."""
    ids = archive.optimizer_ids if optimizer_ids is None else list(optimizer_ids)
    if len(ids) < 2:
        raise ValueError("ranking needs at least two optimizers")
    means = {o: mean_instance_error(archive, o, function_id, dim, budget, trial) for o in ids}
    table = RankingTable() if table is None else table
    table.add(function_id, dim, budget, means)
    return table


def ranking_table(archive, dims, budgets_for_dim, function_ids=None, optimizer_ids=None,
                  trial=1) -> RankingTable:  # fmt: skip
    """Rankings for every function x dim x budget; ``budgets_for_dim(dim)`` lists budgets."""
    table = RankingTable()
    fids = archive.function_ids if function_ids is None else function_ids
    for dim in dims:
        for b in budgets_for_dim(dim):
            for fid in fids:
                rank_optimizers(archive, fid, dim, b, optimizer_ids, trial, table)
    return table


# ---------------------------------------------------------------------------
# CSV; floats are written with repr so ingest(write(A)) == A bit for bit


def write_archive(path, archive: Archive) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in archive:
            head = [r.optimizer_id, r.function_id, r.instance_id, r.dim, r.trial]
            for e, v in zip(r.evaluations.tolist(), r.values.tolist()):
                w.writerow(head + [e, repr(v)])


def ingest(path) -> Archive:
    """Read and validate an archive CSV.

    Raises ArchiveFormatError (with the line number) on malformed rows or
    non-monotone curves, EmptyArchiveError when there are no data rows.
    """
    runs = {}
    last_line = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyArchiveError("empty archive file")
        if tuple(h.strip() for h in header) != COLUMNS:
            raise ArchiveFormatError(f"unexpected header {header}", 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(COLUMNS):
                raise ArchiveFormatError(f"expected {len(COLUMNS)} fields, got {len(row)}", line)
            try:
                key = (row[0].strip(),) + tuple(int(t) for t in row[1:5])
                ev = int(row[5])
                val = float(row[6])
            except ValueError as exc:
                raise ArchiveFormatError(str(exc), line) from None
            if not key[0]:
                raise ArchiveFormatError("empty optimizer_id", line)
            if not np.isfinite(val):
                raise ArchiveFormatError("best_so_far_value must be finite", line)
            evs, vals = runs.setdefault(key, ([], []))
            if evs and ev <= evs[-1]:
                raise ArchiveFormatError(
                    f"run {key}: evaluation_index {ev} does not increase "
                    f"(previous {evs[-1]} at line {last_line[key]})",
                    line,
                )
            if not evs and ev < 1:
                raise ArchiveFormatError(f"run {key}: evaluation_index starts at {ev}", line)
            if vals and val > vals[-1]:
                raise ArchiveFormatError(f"run {key}: best_so_far_value increases", line)
            evs.append(ev)
            vals.append(val)
            last_line[key] = line
    if not runs:
        raise EmptyArchiveError("archive has no runs")
    return Archive(RunRecord(*k, np.array(e), np.array(v)) for k, (e, v) in runs.items())
