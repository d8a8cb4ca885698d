"""Cost-grid sweeps over the evaluation protocol's three question families.

RQ1 varies the outcome-to-intervention cost ratio under decaying mitigation;
RQ2 crosses the ratios with constant mitigation levels; RQ3 crosses the
ratios with compensation magnitudes (stated with the intervention cost fixed
at 1, so compensation values and compensation-to-intervention ratios
coincide). Training is cost-independent, so one estimator is fitted per
dataset and shared by every cell; only the threshold search reruns per cell.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .alarm import log_cost_from_scores
from .cost_model import Constant, CostSpec, LinearPrefixDecay, compile_cost_model
from .exceptions import ConfigError
from .pipeline import (
    BASELINE_POLICIES,
    ExperimentConfig,
    PipelineArtifacts,
    build_estimator,
    load_dataset,
    preprocess_and_split,
)
from .thresholding import find_global_threshold

SWEEP_CSV_COLUMNS = ("dataset", "ratio", "eff", "com", "policy", "avg_cost", "benefit")
_EFF_DECAY_LABEL = "1-k/len"


@dataclass(frozen=True)
class SweepCell:
    ratio: float
    eff_label: str
    com: float
    spec: CostSpec


def sweep_cells(cfg: ExperimentConfig, rq: str) -> list[SweepCell]:
    decay = LinearPrefixDecay(1.0)
    cells = []
    if rq == "RQ1":
        for ratio in cfg.sweep.ratios:
            spec = CostSpec(Constant(1.0), Constant(float(ratio)), Constant(0.0), decay)
            cells.append(SweepCell(ratio, _EFF_DECAY_LABEL, 0.0, spec))
    elif rq == "RQ2":
        for ratio in cfg.sweep.ratios:
            for eff in cfg.sweep.eff_values:
                spec = CostSpec(Constant(1.0), Constant(float(ratio)), Constant(0.0),
                                Constant(float(eff)))
                cells.append(SweepCell(ratio, repr(float(eff)), 0.0, spec))
    elif rq == "RQ3":
        for ratio in cfg.sweep.ratios:
            for com in cfg.sweep.com_values:
                spec = CostSpec(Constant(1.0), Constant(float(ratio)), Constant(float(com)), decay)
                cells.append(SweepCell(ratio, _EFF_DECAY_LABEL, float(com), spec))
    else:
        raise ConfigError(f"unknown sweep question {rq!r}; expected RQ1, RQ2 or RQ3")
    return cells


def run_sweep(
    cfg: ExperimentConfig,
    rq: str | None = None,
    artifacts: PipelineArtifacts | None = None,
    out_path: str | Path | None = None,
) -> list[dict]:
    """Run every cell of a question family and return the long-format rows.

    When ``artifacts`` carries an already-trained pipeline its estimator and
    splits are reused; otherwise data preparation and training run once here.
    One row is emitted per (cell, policy), policies being the tuned threshold
    plus the three fixed baselines.
    """
    rq = rq or cfg.sweep.rq
    cells = sweep_cells(cfg, rq)
    if artifacts is not None:
        splits, estimator = artifacts.splits, artifacts.estimator
    else:
        splits = preprocess_and_split(load_dataset(cfg), cfg)
        estimator = build_estimator(splits.train, cfg)

    thres_scores = estimator.score_log(splits.thres)
    test_scores = estimator.score_log(splits.test)

    rows = []
    for cell in cells:
        model = compile_cost_model(cell.spec)
        search = find_global_threshold(splits.thres, estimator, model,
                                       resolution=cfg.thresholding.resolution,
                                       seed=cfg.seed, scores=thres_scores)
        policies = [("tau_opt", search.best_policy)] + list(BASELINE_POLICIES)
        for name, policy in policies:
            report = log_cost_from_scores(splits.test, test_scores, policy, model)
            rows.append({
                "dataset": cfg.name,
                "ratio": cell.ratio,
                "eff": cell.eff_label,
                "com": cell.com,
                "policy": name,
                "avg_cost": report.avg_cost,
                "benefit": report.benefit,
            })

    if out_path is None and cfg.out_dir:
        out_path = Path(cfg.out_dir) / f"sweep_{rq.lower()}.csv"
    if out_path is not None:
        write_sweep_csv(rows, out_path, estimator)
    return rows


def write_sweep_csv(rows: list[dict], path: str | Path, estimator=None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_CSV_COLUMNS)
        for row in rows:
            writer.writerow([
                row["dataset"], row["ratio"], row["eff"], repr(float(row["com"])),
                row["policy"], repr(float(row["avg_cost"])), repr(float(row["benefit"])),
            ])
    if estimator is not None:
        estimator.save(path.parent / "model.json")
