"""Command line interface.

Every subcommand takes one config file plus optional --seed and --out-dir
overrides, exits 0 on success and nonzero with a stage-tagged message
otherwise. Stage commands exchange artifacts through the output directory:

  generate   write the synthetic log as CSV (data/log.csv + data/schema.yaml)
  prepare    preprocess + split; writes prepared/{train,thres,test}.csv
  train      fit the estimator on prepared/train.csv; writes model.json
  threshold  search the alarm threshold on prepared/thres.csv; writes policy.json
  evaluate   cost the tuned policy and baselines on prepared/test.csv
  sweep      run a full cost-grid sweep (self-contained); writes sweep_<rq>.csv
  roi        closed-form feasibility check for a constant cost regime
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .alarm import AlarmPolicy, ConstantCosts, PartitionCounts, log_cost, roi_feasible
from .cost_model import compile_cost_model, cost_spec_to_config
from .estimator import OutcomeEstimator
from .eventlog.parse import load_schema_config, parse_log, save_schema_config, write_log_csv
from .exceptions import ConfigError, PresmonError
from .pipeline import (
    BASELINE_POLICIES,
    ExperimentConfig,
    build_estimator,
    load_config,
    load_dataset,
    preprocess_and_split,
)
from .sweep import run_sweep
from .synthetic import generate_synthetic
from .thresholding import find_global_threshold


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
        if cfg.data.synthetic is not None:
            cfg.data.synthetic = replace(cfg.data.synthetic, seed=args.seed)
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if not cfg.out_dir:
        raise ConfigError("an output directory is required (config out_dir or --out-dir)")
    return cfg


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    cfg = _load(args)
    if cfg.data.synthetic is None:
        raise ConfigError("generate needs synthetic data parameters in the config")
    log = generate_synthetic(cfg.data.synthetic)
    data_dir = _out_dir(cfg) / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    schema = write_log_csv(log, data_dir / "log.csv")
    save_schema_config(schema, data_dir / "schema.yaml")
    print(f"wrote {len(log)} cases to {data_dir / 'log.csv'}")
    return 0


def cmd_prepare(args) -> int:
    cfg = _load(args)
    splits = preprocess_and_split(load_dataset(cfg), cfg)
    prepared = _out_dir(cfg) / "prepared"
    prepared.mkdir(parents=True, exist_ok=True)
    schema = write_log_csv(splits.train, prepared / "train.csv")
    write_log_csv(splits.thres, prepared / "thres.csv", schema)
    write_log_csv(splits.test, prepared / "test.csv", schema)
    save_schema_config(schema, prepared / "schema.yaml")
    print(f"prepared splits: train={len(splits.train)} thres={len(splits.thres)} "
          f"test={len(splits.test)} under {prepared}")
    return 0


def _read_prepared(cfg: ExperimentConfig, part: str):
    prepared = Path(cfg.out_dir) / "prepared"
    schema_path = prepared / "schema.yaml"
    csv_path = prepared / f"{part}.csv"
    if not csv_path.exists():
        raise ConfigError(f"missing {csv_path}; run the prepare stage first")
    return parse_log(csv_path, load_schema_config(schema_path))


def cmd_train(args) -> int:
    cfg = _load(args)
    train_log = _read_prepared(cfg, "train")
    estimator = build_estimator(train_log, cfg)
    out = _out_dir(cfg)
    estimator.save(out / "model.json")
    estimator.schema.save(out / "schema.json")
    print(f"trained {estimator.metadata.get('kind')} on {len(train_log)} cases; "
          f"model at {out / 'model.json'}")
    return 0


def cmd_threshold(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    model_path = out / "model.json"
    if not model_path.exists():
        raise ConfigError(f"missing {model_path}; run the train stage first")
    estimator = OutcomeEstimator.load(model_path)
    thres_log = _read_prepared(cfg, "thres")
    cost_model = compile_cost_model(cfg.cost_model)
    search = find_global_threshold(thres_log, estimator, cost_model,
                                   resolution=cfg.thresholding.resolution, seed=cfg.seed)
    (out / "policy.json").write_text(json.dumps(search.best_policy.to_dict(), indent=2),
                                     encoding="utf-8")
    (out / "cost_spec.json").write_text(json.dumps(cost_spec_to_config(cfg.cost_model), indent=2),
                                        encoding="utf-8")
    search.to_csv(out / "threshold_trace.csv")
    print(f"selected policy {search.best_policy.label} with thresholding-set cost "
          f"{search.best_cost!r}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    for needed in ("model.json", "policy.json"):
        if not (out / needed).exists():
            raise ConfigError(f"missing {out / needed}; run the earlier stages first")
    estimator = OutcomeEstimator.load(out / "model.json")
    policy = AlarmPolicy.from_dict(json.loads((out / "policy.json").read_text(encoding="utf-8")))
    test_log = _read_prepared(cfg, "test")
    cost_model = compile_cost_model(cfg.cost_model)

    report = log_cost(test_log, estimator, policy, cost_model)
    report.to_csv(out / "report.csv")
    lines = [f"policy {policy.label}: avg_cost={report.avg_cost!r} benefit={report.benefit!r}"]
    for name, baseline in BASELINE_POLICIES:
        r = log_cost(test_log, estimator, baseline, cost_model)
        lines.append(f"baseline {name}: avg_cost={r.avg_cost!r} benefit={r.benefit!r}")
    summary = "\n".join(lines) + "\n"
    (out / "summary.txt").write_text(summary, encoding="utf-8")
    print(summary, end="")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    rq = args.rq or cfg.sweep.rq
    rows = run_sweep(cfg, rq)
    print(f"sweep {rq}: {len(rows)} rows -> {Path(cfg.out_dir) / f'sweep_{rq.lower()}.csv'}")
    return 0


def cmd_roi(args) -> int:
    cfg = load_config(args.config)
    section = cfg.roi
    if not section:
        raise ConfigError("config has no roi section")
    try:
        counts = PartitionCounts(**{k: int(v) for k, v in section["counts"].items()})
        costs = ConstantCosts(**{k: float(v) for k, v in section["costs"].items()})
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"roi section needs 'counts' and 'costs' mappings: {exc}") from exc
    feasible = roi_feasible(counts, costs)
    lhs = counts.und_al * (costs.eff * costs.c_out - costs.c_in)
    rhs = counts.des_al * (costs.c_in + costs.c_com)
    print(f"avoidable={lhs!r} burned={rhs!r} -> roi_feasible={feasible}")
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "prepare": cmd_prepare,
    "train": cmd_train,
    "threshold": cmd_threshold,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "roi": cmd_roi,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="presmon",
                                     description="cost-aware alarming over outcome predictions")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("config", help="path to the experiment config file (YAML)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out-dir", default=None, help="override the config output directory")
        if name == "sweep":
            p.add_argument("--rq", choices=("RQ1", "RQ2", "RQ3"), default=None,
                           help="override the sweep question family")
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except PresmonError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
