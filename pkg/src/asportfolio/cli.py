"""Command-line driver: generate | features | portfolio | train-eval | report | all.

Each command reads its inputs from files written by an earlier command and
writes its own outputs once, after all results are merged in key order, so
serial and parallel runs produce the same bytes.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from ._seeding import derive_seed
from .archive import MissingDataError, ingest, write_archive
from .bench import feature_table, read_runs, run_experiment, write_report, write_runs
from .config import ConfigError, load_config
from .ela import feature_names
from .ela.vector import read_feature_csv, write_feature_csv
from .portfolio import build_portfolio, portfolio_label, read_portfolios, write_portfolios
from .suite import FUNCTION_IDS, get_instance, write_manifest
from .zoo import DEFAULT_ZOO, generate_archive

log = logging.getLogger("asportfolio")

COMMANDS = ("generate", "features", "portfolio", "train-eval", "report")


class UpstreamMissing(RuntimeError):
    pass


def _need(path, producer, cfg_path):
    if not os.path.exists(path):
        raise UpstreamMissing(
            f"{path} not found; run `asportfolio {producer} --config {cfg_path}` first"
        )


def portfolio_path(cfg, dim):
    return os.path.join(cfg.output_dir, f"portfolios_d{dim}.txt")


def runs_path(cfg):
    return os.path.join(cfg.output_dir, "runs.csv")


def cmd_generate(cfg, jobs=1, reveal_optima=False, **_):
    specs = [s for s in DEFAULT_ZOO if s.id in set(cfg.optimizers)]
    archive = generate_archive(specs, FUNCTION_IDS, cfg.dims, cfg.archive_trials,
                               cfg.master_seed, jobs=jobs)  # fmt: skip
    os.makedirs(os.path.dirname(cfg.archive) or ".", exist_ok=True)
    write_archive(cfg.archive, archive)
    os.makedirs(cfg.output_dir, exist_ok=True)
    insts = [get_instance(f, i, d) for d in cfg.dims for f in FUNCTION_IDS for i in range(1, 6)]
    write_manifest(os.path.join(cfg.output_dir, "suite_manifest.csv"), insts, reveal_optima)
    log.info("generate: %d runs -> %s", len(archive), cfg.archive)


def cmd_features(cfg, jobs=1, **_):
    table = feature_table(cfg.dims, cfg.s_schedule, cfg.trials, cfg.master_seed,
                          enabled_classes=cfg.feature_classes, jobs=jobs)  # fmt: skip
    os.makedirs(os.path.dirname(cfg.feature_cache) or ".", exist_ok=True)
    write_feature_csv(cfg.feature_cache, table.items(), feature_names(cfg.feature_classes))
    log.info("features: %d vectors -> %s", len(table), cfg.feature_cache)


def build_portfolios(archive, cfg, dim):
    """A_0 (budget 100n) and A_s (budget 100n - s n) for every s in the schedule."""
    full = cfg.max_fe_multiplier * dim
    out = []
    for s_mult in (0, *cfg.s_schedule):
        budget = full - s_mult * dim
        out.append(build_portfolio(
            archive, [dim], budget, cfg.k, cfg.restarts, cfg.iterations,
            derive_seed(cfg.master_seed, "portfolio", dim, budget), objective=cfg.objective,
            label=portfolio_label(s_mult),
        ))  # fmt: skip
    return out


def cmd_portfolio(cfg, cfg_path="CONFIG", **_):
    _need(cfg.archive, "generate", cfg_path)
    archive = ingest(cfg.archive)
    os.makedirs(cfg.output_dir, exist_ok=True)
    for dim in cfg.dims:
        ports = build_portfolios(archive, cfg, dim)
        write_portfolios(portfolio_path(cfg, dim), ports)
        log.info("portfolio: n=%d %s", dim, "; ".join(f"{p.label}={','.join(p.members)}" for p in ports))


def systems_for(ports, s_mult, mode):
    by = {p.label: p for p in ports}
    aware, ignorant = by[portfolio_label(s_mult)], by[portfolio_label(0)]
    return {"aware": [aware], "ignorant": [ignorant], "both": [ignorant, aware]}[mode]


def cmd_train_eval(cfg, jobs=1, cfg_path="CONFIG", trace=None, **_):
    """``trace`` (a list, API use only) collects the fold audit of run_experiment."""
    _need(cfg.archive, "generate", cfg_path)
    _need(cfg.feature_cache, "features", cfg_path)
    for dim in cfg.dims:
        _need(portfolio_path(cfg, dim), "portfolio", cfg_path)
    archive = ingest(cfg.archive)
    features = dict(read_feature_csv(cfg.feature_cache))
    results = []
    for dim in cfg.dims:
        ports = read_portfolios(portfolio_path(cfg, dim))
        for s_mult in cfg.s_schedule:
            for scheme in cfg.scheme:
                t0 = time.perf_counter()
                results += run_experiment(
                    archive, systems_for(ports, s_mult, cfg.portfolio_mode), s_mult, dim, scheme,
                    cfg.trials, cfg.master_seed, features, enabled_classes=cfg.feature_classes,
                    target=cfg.target, forest_kwargs={"n_trees": cfg.n_trees}, jobs=jobs,
                    trace=trace, strict_features=True,
                )  # fmt: skip
                log.info("train-eval: n=%d s=%dn %s %.1fs", dim, s_mult, scheme,
                         time.perf_counter() - t0)  # fmt: skip
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_runs(runs_path(cfg), results)
    log.info("train-eval: %d results -> %s", len(results), runs_path(cfg))


def cmd_report(cfg, cfg_path="CONFIG", **_):
    _need(runs_path(cfg), "train-eval", cfg_path)
    paths = write_report(cfg.output_dir, read_runs(runs_path(cfg)))
    log.info("report: %s", ", ".join(os.path.basename(p) for p in paths))


HANDLERS = {
    "generate": cmd_generate,
    "features": cmd_features,
    "portfolio": cmd_portfolio,
    "train-eval": cmd_train_eval,
    "report": cmd_report,
}


def build_parser():
    p = argparse.ArgumentParser(prog="asportfolio", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=(*COMMANDS, "all"))
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--seed", type=int, default=None, metavar="U64",
                   help="overrides master_seed from the config")  # fmt: skip
    p.add_argument("--portfolio-mode", choices=("aware", "ignorant", "both"), default=None)
    p.add_argument("--reveal-optima", action="store_true",
                   help="include x_opt in the suite manifest")  # fmt: skip
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s")  # fmt: skip
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(args.config, master_seed=args.seed, portfolio_mode=args.portfolio_mode)
        commands = COMMANDS if args.command == "all" else (args.command,)
        for c in commands:
            HANDLERS[c](cfg, jobs=args.jobs, reveal_optima=args.reveal_optima,
                        cfg_path=args.config)  # fmt: skip
    except (ConfigError, UpstreamMissing, MissingDataError, FileNotFoundError) as exc:
        print(f"asportfolio: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
