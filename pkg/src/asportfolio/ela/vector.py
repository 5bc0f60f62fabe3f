"""FeatureVector and the feature cache file."""

from __future__ import annotations

import csv
import math
from collections import OrderedDict

import numpy as np

MISSING = None


def clean(value):
    """Map anything non-finite to the missing marker, everything else to float."""
    if value is None:
        return MISSING
    value = float(value)
    return value if math.isfinite(value) else MISSING


class FeatureVector:
    """Ordered feature-name -> value-or-None map with a class tag per name.

    Missing values are ``None``; NaN never appears in ``entries``.
    """

    __slots__ = ("_entries", "_tags", "_status")

    def __init__(self, entries=None, class_tags=None, status=None):
        self._entries = OrderedDict()
        self._tags = {}
        self._status = dict(status or {})
        for name, value in (entries or {}).items():
            self._entries[name] = clean(value)
            self._tags[name] = (class_tags or {}).get(name, name.split(".", 1)[0])

    @classmethod
    def from_class(cls, class_name, pairs):
        entries = OrderedDict((f"{class_name}.{k}", v) for k, v in pairs)
        tags = {k: class_name for k in entries}
        n_ok = sum(clean(v) is not None for v in entries.values())
        status = "ok" if n_ok == len(entries) else ("missing" if n_ok == 0 else "partial")
        return cls(entries, tags, {class_name: status})

    @classmethod
    def concat(cls, parts):
        entries, tags, status = OrderedDict(), {}, {}
        for p in parts:
            for k, v in p._entries.items():
                if k in entries:
                    raise ValueError(f"duplicate feature name {k!r}")
                entries[k] = v
                tags[k] = p._tags[k]
            status.update(p._status)
        return cls(entries, tags, status)

    @property
    def entries(self):
        return OrderedDict(self._entries)

    @property
    def class_tags(self):
        return dict(self._tags)

    @property
    def status(self):
        """Per-class outcome: 'ok', 'partial' or 'missing'."""
        return dict(self._status)

    @property
    def names(self):
        return list(self._entries)

    def __getitem__(self, name):
        return self._entries[name]

    def __contains__(self, name):
        return name in self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def items(self):
        return self._entries.items()

    def is_missing(self, name) -> bool:
        return self._entries[name] is None

    def to_array(self, names=None) -> np.ndarray:
        """Float array in ``names`` order; missing (or absent) entries become NaN."""
        names = self.names if names is None else names
        return np.array(
            [np.nan if self._entries.get(k) is None else self._entries[k] for k in names],
            dtype=float,
        )

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self._entries == other._entries and self._tags == other._tags

    __hash__ = None

    def __repr__(self):
        n_missing = sum(v is None for v in self._entries.values())
        return f"FeatureVector({len(self)} features, {n_missing} missing)"


# ---------------------------------------------------------------------------
# feature cache: one row per (function_id, instance_id, dim, s, trial_seed);
# empty cell = missing

KEY_COLUMNS = ("function_id", "instance_id", "dim", "s", "trial_seed")


def write_feature_csv(path, rows, names=None) -> None:
    """``rows`` is an iterable of (key tuple, FeatureVector)."""
    rows = list(rows)
    if names is None:
        names = rows[0][1].names if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(KEY_COLUMNS) + list(names))
        for key, fv in rows:
            cells = ["" if fv.entries.get(k) is None else repr(fv[k]) for k in names]
            w.writerow([str(int(k)) for k in key] + cells)


def read_feature_csv(path):
    """Inverse of ``write_feature_csv``: list of (key tuple, FeatureVector)."""
    out = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        nk = len(KEY_COLUMNS)
        if tuple(header[:nk]) != KEY_COLUMNS:
            raise ValueError(f"{path}: unexpected key columns {header[:nk]}")
        names = header[nk:]
        for row in r:
            key = tuple(int(t) for t in row[:nk])
            vals = {n: (None if c == "" else float(c)) for n, c in zip(names, row[nk:])}
            out.append((key, FeatureVector(vals)))
    return out
