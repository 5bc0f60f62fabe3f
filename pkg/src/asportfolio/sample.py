"""Design points for feature computation and the evaluation budget they use.

Every AS run owns one ``BudgetLedger`` with ``max_fe = 100 n``. Sampling is
charged first; the selected optimizer may then spend at most what is left.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .suite import LOWER, UPPER, ProblemInstance, evaluate_batch

S_PRESETS = (10, 15, 20, 25, 50)
MAX_FE_MULTIPLIER = 100

# keeps jittered points away from bin edges so rounding cannot move them
_EDGE = 1e-9


class BudgetExhausted(RuntimeError):
    """Raised when a charge would exceed the ledger's ``max_fe``."""


@dataclass
class BudgetLedger:
    max_fe: int
    spent_sampling: int = 0
    spent_optimizer: int = 0

    @classmethod
    def for_dim(cls, dim: int, multiplier: int = MAX_FE_MULTIPLIER):
        return cls(max_fe=int(multiplier) * int(dim))

    @property
    def spent(self) -> int:
        return self.spent_sampling + self.spent_optimizer

    @property
    def remaining(self) -> int:
        return self.max_fe - self.spent

    def _check(self, count):
        count = int(count)
        if count < 0:
            raise ValueError("charges must be non-negative")
        if count > self.remaining:
            raise BudgetExhausted(
                f"requested {count} evaluations, {self.remaining} of {self.max_fe} left"
            )
        return count

    def charge_sampling(self, count: int) -> None:
        self.spent_sampling += self._check(count)

    def charge_optimizer(self, count: int) -> None:
        self.spent_optimizer += self._check(count)


@dataclass(frozen=True, eq=False)
class Sample:
    """Design ``points`` (s x n), their ``values`` and the evaluations used."""

    points: np.ndarray
    values: np.ndarray
    evaluations_used: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, ndmin=2)
        vals = np.array(self.values, dtype=float).ravel()
        if pts.shape[0] != vals.shape[0] or vals.shape[0] != self.evaluations_used:
            raise ValueError("points, values and evaluations_used disagree")
        pts.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def with_values(self, values) -> "Sample":
        """Same design, different objective values (used by invariance tests)."""
        return Sample(self.points, values, self.evaluations_used, dict(self.meta))

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return (
            self.evaluations_used == other.evaluations_used
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def latin_hypercube(dim: int, count: int, seed: int) -> np.ndarray:
    """``count`` x ``dim`` Latin hypercube in [-5, 5]^dim.

    Each column visits every one of the ``count`` equal-width bins exactly
    once; the position inside a bin is uniform.
    """
    dim, count = int(dim), int(count)
    if dim < 1 or count < 1:
        raise ValueError("dim and count must be >= 1")
    rng = np.random.default_rng(seed)
    bins = np.argsort(rng.random((count, dim)), axis=0, kind="stable")
    u = np.clip(rng.random((count, dim)), _EDGE, 1.0 - _EDGE)
    width = (UPPER - LOWER) / count
    return LOWER + (bins + u) * width


def uniform_design(dim: int, count: int, seed: int) -> np.ndarray:
    """Plain uniform random design, kept for ablations."""
    dim, count = int(dim), int(count)
    if dim < 1 or count < 1:
        raise ValueError("dim and count must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(LOWER, UPPER, size=(count, dim))


_DESIGNS = {"lhs": latin_hypercube, "uniform": uniform_design}


def draw_sample(
    instance: ProblemInstance,
    s: int,
    seed: int,
    ledger: BudgetLedger,
    method: str = "lhs",
) -> Sample:
    """Draw ``s`` design points, evaluate them and charge ``s`` to ``ledger``."""
    s = int(s)
    if s < 1:
        raise ValueError("sample size must be >= 1")
    if method not in _DESIGNS:
        raise ValueError(f"unknown design method {method!r}")
    ledger.charge_sampling(s)
    X = _DESIGNS[method](instance.dim, s, seed)
    y = evaluate_batch(instance, X)
    meta = {
        "function_id": instance.function_id,
        "instance_id": instance.instance_id,
        "dim": instance.dim,
        "s": s,
        "seed": int(seed),
    }
    return Sample(X, y, s, meta)


# ---------------------------------------------------------------------------
# sample cache: "# key=value ..." comment line, header x_1..x_n,f, one row
# per point; floats via repr so a round trip is exact

_META_KEYS = ("function_id", "instance_id", "dim", "s", "seed")


def write_sample_csv(path, sample: Sample) -> None:
    with open(path, "w", newline="") as fh:
        meta = " ".join(f"{k}={sample.meta.get(k, '')}" for k in _META_KEYS)
        fh.write(f"# {meta}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x_{i + 1}" for i in range(sample.dim)] + ["f"])
        for x, v in zip(sample.points, sample.values):
            w.writerow([repr(float(t)) for t in x] + [repr(float(v))])


def read_sample_csv(path) -> Sample:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing metadata comment line")
        meta = {}
        for item in first[1:].split():
            k, _, v = item.partition("=")
            meta[k] = int(v) if v else None
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if not header or header[-1] != "f":
        raise ValueError(f"{path}: last column must be 'f'")
    data = np.array([[float(t) for t in r] for r in body], dtype=float)
    data = data.reshape(len(body), len(header))
    return Sample(data[:, :-1], data[:, -1], len(body), meta)
