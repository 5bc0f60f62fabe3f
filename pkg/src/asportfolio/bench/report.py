"""Report bundle: Friedman ranks, SBS tallies and VBS-selection rates as CSV."""

from __future__ import annotations

import csv
import logging
import os
from collections import defaultdict

import numpy as np

from .experiment import write_runs
from .stats import (friedman_average_ranks, friedman_statistic, sbs_comparison,
                    vbs_selection_rate)  # fmt: skip

log = logging.getLogger(__name__)

REPORT_FILES = ("friedman.csv", "friedman_chi2.csv", "sbs_tally.csv", "sbs_symbols.csv",
                "vbs_rate.csv")  # fmt: skip


def _writer(path):
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def _group(results, key):
    out = defaultdict(list)
    for r in results:
        out[key(r)].append(r)
    return dict(sorted(out.items()))


def mean_error_matrix(results):
    """systems, functions, (systems x functions) mean realized error."""
    by = _group(results, lambda r: (r.system, r.function_id))
    systems = sorted({k[0] for k in by})
    funcs = sorted({k[1] for k in by})
    M = np.array([[np.mean([r.error for r in by[(s, f)]]) for f in funcs] for s in systems])
    return systems, funcs, M


def write_report(out_dir, results, include_runs=False) -> list:
    """Write the report files for ``results``; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, n) for n in REPORT_FILES]
    groups = _group(results, lambda r: (r.scheme, r.dim))

    fh, w = _writer(paths[0])
    fh2, w2 = _writer(paths[1])
    w.writerow(["scheme", "system", "dim", "avg_rank"])
    w2.writerow(["scheme", "dim", "n_systems", "n_problems", "chi2"])
    for (scheme, dim), rs in groups.items():
        systems, funcs, M = mean_error_matrix(rs)
        if len(systems) < 2 or len(funcs) < 2:
            log.info("friedman: skipping %s n=%d (%d systems)", scheme, dim, len(systems))
            continue
        for s, a in zip(systems, friedman_average_ranks(M)):
            w.writerow([scheme, s, dim, repr(float(a))])
        w2.writerow([scheme, dim, len(systems), len(funcs), repr(friedman_statistic(M))])
    fh.close()
    fh2.close()

    fh, w = _writer(paths[2])
    fh2, w2 = _writer(paths[3])
    w.writerow(["scheme", "portfolio", "s", "dim", "sbs", "plus", "minus", "approx"])
    w2.writerow(["scheme", "portfolio", "s", "dim", "function_id", "symbol"])
    for (scheme, dim, system), rs in _group(results, lambda r: (r.scheme, r.dim, r.system)).items():
        per_f = {f: ([r.error for r in g], [r.sbs_error for r in g])
                 for f, g in _group(rs, lambda r: r.function_id).items()}  # fmt: skip
        symbols, tally = sbs_comparison(per_f)
        port, s = rs[0].portfolio, rs[0].s
        w.writerow([scheme, port, s, dim, rs[0].sbs_id, *tally])
        for f, sym in symbols.items():
            w2.writerow([scheme, port, s, dim, f, sym])
    fh.close()
    fh2.close()

    fh, w = _writer(paths[4])
    w.writerow(["scheme", "system", "function_id", "dim", "percentage", "percentage_full"])
    for (scheme, dim, system), rs in _group(results, lambda r: (r.scheme, r.dim, r.system)).items():
        rate = vbs_selection_rate(rs)
        full = vbs_selection_rate(rs, full_budget=True)
        for f in rate:
            w.writerow([scheme, system, f, dim, repr(rate[f]), repr(full[f])])
    fh.close()

    if include_runs:
        paths.append(os.path.join(out_dir, "runs.csv"))
        write_runs(paths[-1], results)
    return paths
