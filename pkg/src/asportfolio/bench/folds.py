"""Leave-one-function-out and leave-one-instance-out fold plans."""

from __future__ import annotations

from dataclasses import dataclass

from ..archive import INSTANCES
from ..suite import FUNCTION_IDS

SCHEMES = ("LOFO", "LOIO")


@dataclass(frozen=True)
class Fold:
    train: tuple  # (function_id, instance_id) keys
    test: tuple


@dataclass(frozen=True)
class FoldPlan:
    scheme: str
    dim: int
    folds: tuple

    def __len__(self):
        return len(self.folds)

    def __iter__(self):
        return iter(self.folds)

    def validate(self):
        """Disjoint train/test per fold; test sets partition all keys."""
        seen = []
        for f in self.folds:
            if set(f.train) & set(f.test):
                raise AssertionError(f"{self.scheme} fold overlaps: {set(f.train) & set(f.test)}")
            seen.extend(f.test)
        everything = set(self.folds[0].train) | set(self.folds[0].test)
        if len(seen) != len(set(seen)) or set(seen) != everything:
            raise AssertionError(f"{self.scheme} test sets do not partition the instances")


def make_folds(scheme, functions=FUNCTION_IDS, instances=INSTANCES, dim=2) -> FoldPlan:
    """LOFO: one fold per function, testing its instances. LOIO: one fold per
    instance id, testing that instance of every function."""
    scheme = scheme.upper()
    keys = [(f, i) for f in functions for i in instances]
    if scheme == "LOFO":
        groups = [[k for k in keys if k[0] == f] for f in functions]
    elif scheme == "LOIO":
        groups = [[k for k in keys if k[1] == i] for i in instances]
    else:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    folds = []
    for test in groups:
        t = set(test)
        folds.append(Fold(tuple(k for k in keys if k not in t), tuple(test)))
    return FoldPlan(scheme, int(dim), tuple(folds))
