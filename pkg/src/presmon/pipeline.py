"""End-to-end experiment pipeline and its configuration file format.

Stage order: load or generate the log, cut outcome-revealing suffixes,
truncate very long traces at the configured length percentile, split
temporally, fold rare categories (fitted on the training part only), impute
missing payload values, fit the encoder and train the estimator on the
training part, search the alarm threshold on the thresholding part, and
evaluate the tuned policy against the fixed baselines (never alarm, alarm
immediately, alarm at 0.5) on the test part.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .alarm import AlarmPolicy, CostReport, log_cost_from_scores
from .cost_model import (
    Constant,
    CostSpec,
    LinearPrefixDecay,
    compile_cost_model,
    cost_spec_from_config,
    cost_spec_to_config,
)
from .encoding import PrefixEncoder
from .estimator import Hyperparams, OutcomeEstimator, tune_hyperparams
from .eventlog.model import EventLog, SplitLogs
from .eventlog.parse import load_schema_config, parse_log
from .eventlog.preprocess import RareCategoryFolder, cut_trivially_known, impute_missing, truncate_log
from .eventlog.split import temporal_split
from .exceptions import ConfigError
from .synthetic import SyntheticSpec, generate_synthetic
from .thresholding import ThresholdSearchResult, find_global_threshold

BASELINE_POLICIES: tuple[tuple[str, AlarmPolicy], ...] = (
    ("never", AlarmPolicy.never()),
    ("tau0", AlarmPolicy.global_threshold(0.0)),
    ("tau05", AlarmPolicy.global_threshold(0.5)),
)

DEFAULT_RATIOS = (1, 2, 3, 5, 10, 20)
DEFAULT_EFF_VALUES = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
DEFAULT_COM_VALUES = (0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)


@dataclass
class DataConfig:
    synthetic: SyntheticSpec | None = None
    csv: str | None = None
    schema: str | None = None
    delimiter: str = ","


@dataclass
class PreprocessConfig:
    truncate_percentile: float = 90.0
    rare_min_count: int = 10
    trigger_rules: tuple[str, ...] = ()


@dataclass
class SplitConfig:
    train_frac: float = 0.64
    thres_frac: float = 0.16


@dataclass
class EstimatorConfig:
    kind: str = "gbt"
    search_budget: int = 1
    hyperparams: Hyperparams | None = None  # set to skip the search entirely


@dataclass
class ThresholdingConfig:
    resolution: int = 101


@dataclass
class SweepConfig:
    rq: str = "RQ1"
    ratios: tuple = DEFAULT_RATIOS
    eff_values: tuple = DEFAULT_EFF_VALUES
    com_values: tuple = DEFAULT_COM_VALUES


def _default_cost_spec() -> CostSpec:
    return CostSpec(c_in=Constant(1.0), c_out=Constant(20.0),
                    c_com=Constant(0.0), eff=LinearPrefixDecay(1.0))


@dataclass
class ExperimentConfig:
    name: str = "synthetic"
    seed: int = 0
    out_dir: str | None = None
    data: DataConfig = field(default_factory=DataConfig)
    preprocessing: PreprocessConfig = field(default_factory=PreprocessConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    cost_model: CostSpec = field(default_factory=_default_cost_spec)
    thresholding: ThresholdingConfig = field(default_factory=ThresholdingConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    roi: dict = field(default_factory=dict)


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    _check_keys(raw, {"name", "seed", "out_dir", "data", "preprocessing", "split",
                      "estimator", "cost_model", "thresholding", "sweep", "roi"}, "config")
    cfg = ExperimentConfig()
    cfg.name = str(raw.get("name", cfg.name))
    cfg.seed = int(raw.get("seed", cfg.seed))
    cfg.out_dir = raw.get("out_dir")

    data = raw.get("data", {})
    _check_keys(data, {"synthetic", "csv", "schema", "delimiter"}, "data")
    if "synthetic" in data:
        syn = dict(data["synthetic"])
        _check_keys(syn, set(SyntheticSpec.__dataclass_fields__), "data.synthetic")
        syn.setdefault("seed", cfg.seed)
        cfg.data.synthetic = SyntheticSpec(**syn)
    cfg.data.csv = data.get("csv")
    cfg.data.schema = data.get("schema")
    cfg.data.delimiter = data.get("delimiter", ",")
    if cfg.data.synthetic is None and cfg.data.csv is None:
        raise ConfigError("data section needs either 'synthetic' parameters or a 'csv' path")
    if cfg.data.csv is not None and cfg.data.schema is None:
        raise ConfigError("csv data needs a 'schema' config path")

    pre = raw.get("preprocessing", {})
    _check_keys(pre, {"truncate_percentile", "rare_min_count", "trigger_rules"}, "preprocessing")
    cfg.preprocessing.truncate_percentile = float(pre.get("truncate_percentile", 90.0))
    cfg.preprocessing.rare_min_count = int(pre.get("rare_min_count", 10))
    cfg.preprocessing.trigger_rules = tuple(pre.get("trigger_rules", ()))

    split = raw.get("split", {})
    _check_keys(split, {"train_frac", "thres_frac"}, "split")
    cfg.split.train_frac = float(split.get("train_frac", 0.64))
    cfg.split.thres_frac = float(split.get("thres_frac", 0.16))

    est = raw.get("estimator", {})
    _check_keys(est, {"kind", "search_budget", "hyperparams"}, "estimator")
    cfg.estimator.kind = est.get("kind", "gbt")
    if cfg.estimator.kind not in ("gbt", "logreg"):
        raise ConfigError(f"estimator.kind must be 'gbt' or 'logreg', got {cfg.estimator.kind!r}")
    cfg.estimator.search_budget = int(est.get("search_budget", 1))
    if cfg.estimator.search_budget < 1:
        raise ConfigError("estimator.search_budget must be >= 1")
    if "hyperparams" in est:
        hp = dict(est["hyperparams"])
        _check_keys(hp, set(Hyperparams.__dataclass_fields__), "estimator.hyperparams")
        cfg.estimator.hyperparams = Hyperparams(**hp)

    if "cost_model" in raw:
        cfg.cost_model = cost_spec_from_config(raw["cost_model"])

    thr = raw.get("thresholding", {})
    _check_keys(thr, {"resolution"}, "thresholding")
    cfg.thresholding.resolution = int(thr.get("resolution", 101))

    sweep = raw.get("sweep", {})
    _check_keys(sweep, {"rq", "ratios", "eff_values", "com_values"}, "sweep")
    cfg.sweep.rq = str(sweep.get("rq", "RQ1"))
    cfg.sweep.ratios = tuple(sweep.get("ratios", DEFAULT_RATIOS))
    cfg.sweep.eff_values = tuple(sweep.get("eff_values", DEFAULT_EFF_VALUES))
    cfg.sweep.com_values = tuple(sweep.get("com_values", DEFAULT_COM_VALUES))
    for grid_name in ("ratios", "eff_values", "com_values"):
        if not getattr(cfg.sweep, grid_name):
            raise ConfigError(f"sweep.{grid_name} must be non-empty")

    cfg.roi = raw.get("roi", {})
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return config_from_dict(raw or {})


def load_dataset(cfg: ExperimentConfig) -> EventLog:
    if cfg.data.csv is not None:
        schema = load_schema_config(cfg.data.schema)
        return parse_log(cfg.data.csv, schema, delimiter=cfg.data.delimiter)
    return generate_synthetic(cfg.data.synthetic)


def preprocess_and_split(log: EventLog, cfg: ExperimentConfig) -> SplitLogs:
    log = cut_trivially_known(log, cfg.preprocessing.trigger_rules)
    log = truncate_log(log, cfg.preprocessing.truncate_percentile)
    splits = temporal_split(log, cfg.split.train_frac, cfg.split.thres_frac, seed=cfg.seed)
    folder = RareCategoryFolder(cfg.preprocessing.rare_min_count).fit(splits.train)
    return SplitLogs(
        train=impute_missing(folder.transform(splits.train)),
        thres=impute_missing(folder.transform(splits.thres)),
        test=impute_missing(folder.transform(splits.test)),
    )


def build_estimator(train_log: EventLog, cfg: ExperimentConfig) -> OutcomeEstimator:
    encoder = PrefixEncoder().fit(train_log)
    hp = cfg.estimator.hyperparams
    metadata: dict = {"search_budget": cfg.estimator.search_budget, "seed": cfg.seed}
    if hp is None:
        hp = tune_hyperparams(train_log, encoder, cfg.estimator.search_budget,
                              seed=cfg.seed, kind=cfg.estimator.kind)
    return OutcomeEstimator.train(train_log, hp, kind=cfg.estimator.kind,
                                  encoder=encoder, metadata=metadata)


@dataclass
class PipelineArtifacts:
    config: ExperimentConfig
    splits: SplitLogs
    estimator: OutcomeEstimator
    search: ThresholdSearchResult
    policy: AlarmPolicy
    test_reports: dict[str, CostReport]  # policy name -> report on the test log

    @property
    def report(self) -> CostReport:
        return self.test_reports["tau_opt"]


def run_pipeline(cfg: ExperimentConfig) -> PipelineArtifacts:
    """Run the full protocol; writes artifacts when the config names an out_dir."""
    log = load_dataset(cfg)
    splits = preprocess_and_split(log, cfg)
    estimator = build_estimator(splits.train, cfg)

    cost_model = compile_cost_model(cfg.cost_model)
    search = find_global_threshold(splits.thres, estimator, cost_model,
                                   resolution=cfg.thresholding.resolution, seed=cfg.seed)

    test_scores = estimator.score_log(splits.test)
    reports = {"tau_opt": log_cost_from_scores(splits.test, test_scores, search.best_policy, cost_model)}
    for name, policy in BASELINE_POLICIES:
        reports[name] = log_cost_from_scores(splits.test, test_scores, policy, cost_model)

    artifacts = PipelineArtifacts(cfg, splits, estimator, search, search.best_policy, reports)
    if cfg.out_dir:
        persist_artifacts(artifacts, Path(cfg.out_dir))
    return artifacts


def persist_artifacts(artifacts: PipelineArtifacts, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts.estimator.save(out_dir / "model.json")
    artifacts.estimator.schema.save(out_dir / "schema.json")
    (out_dir / "policy.json").write_text(
        json.dumps(artifacts.policy.to_dict(), indent=2), encoding="utf-8")
    (out_dir / "cost_spec.json").write_text(
        json.dumps(cost_spec_to_config(artifacts.config.cost_model), indent=2), encoding="utf-8")
    artifacts.search.to_csv(out_dir / "threshold_trace.csv")
    artifacts.report.to_csv(out_dir / "report.csv")
    (out_dir / "summary.txt").write_text(render_summary(artifacts), encoding="utf-8")


def render_summary(artifacts: PipelineArtifacts) -> str:
    cfg = artifacts.config
    lines = [
        f"dataset: {cfg.name}",
        f"seed: {cfg.seed}",
        f"cases (train/thres/test): {len(artifacts.splits.train)}/"
        f"{len(artifacts.splits.thres)}/{len(artifacts.splits.test)}",
        f"estimator: {artifacts.estimator.metadata.get('kind', 'gbt')} "
        f"{artifacts.estimator.metadata.get('hyperparams', {})}",
        f"selected policy: {artifacts.policy.label}",
        f"thresholding-set cost at selected policy: {artifacts.search.best_cost!r}",
        "",
        "test-set results per policy:",
    ]
    for name in ("tau_opt", "never", "tau0", "tau05"):
        r = artifacts.test_reports[name]
        lines.append(
            f"  {name:8s} avg_cost={r.avg_cost!r} benefit={r.benefit!r} roi={r.roi!r} "
            f"counts={r.counts.to_dict()}"
        )
    return "\n".join(lines) + "\n"
