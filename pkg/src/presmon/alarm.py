"""Alarm decisions, exact case and log costs, benefit and ROI accounting.

An alarm fires at most once per case, at the first decision point (prefix
length 1..len-1) whose predicted likelihood reaches the policy threshold.
The cost of a case then follows the four-way split over (outcome, alarmed):

    undesired & alarmed      c_in(i) + (1 - eff(i)) * c_out
    desired  & alarmed       c_in(i) + c_com
    undesired & not alarmed  c_out
    desired  & not alarmed   0

Per-case records are computed independently and reduced in log order, so the
evaluation parallelizes over traces without changing results.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .cost_model import CostModel
from .eventlog.model import EventLog, Trace
from .exceptions import CostEvaluationError


@dataclass(frozen=True)
class AlarmPolicy:
    """Thresholding rule applied to predicted likelihoods.

    Modes: ``global`` (one threshold), ``per_length`` (threshold per decision
    position with a default for unlisted positions), ``never`` and ``always``.
    """

    mode: str
    tau: float | None = None
    per_length: tuple[tuple[int, float], ...] | None = None

    def __post_init__(self):
        if self.mode not in ("global", "per_length", "never", "always"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.mode == "global":
            self._check_tau(self.tau)
        if self.mode == "per_length":
            self._check_tau(self.tau)
            if self.per_length is None:
                raise ValueError("per_length mode requires thresholds")
            for k, tau in self.per_length:
                if k < 1:
                    raise ValueError(f"prefix length must be >= 1, got {k}")
                self._check_tau(tau)

    @staticmethod
    def _check_tau(tau):
        if tau is None or not (0.0 <= tau <= 1.0):
            raise ValueError(f"threshold must be in [0, 1], got {tau!r}")

    @classmethod
    def global_threshold(cls, tau: float) -> "AlarmPolicy":
        return cls(mode="global", tau=tau)

    @classmethod
    def per_length_thresholds(cls, thresholds: Mapping[int, float], default: float) -> "AlarmPolicy":
        items = tuple(sorted(thresholds.items()))
        return cls(mode="per_length", tau=default, per_length=items)

    @classmethod
    def never(cls) -> "AlarmPolicy":
        return cls(mode="never")

    @classmethod
    def always(cls) -> "AlarmPolicy":
        return cls(mode="always")

    def threshold_for(self, k: int) -> float:
        if self.mode == "global":
            return self.tau
        if self.mode == "per_length":
            for kk, tau in self.per_length:
                if kk == k:
                    return tau
            return self.tau
        raise ValueError(f"{self.mode} policy has no thresholds")

    @property
    def label(self) -> str:
        if self.mode == "global":
            return f"tau={self.tau:g}"
        if self.mode == "per_length":
            return "per_length"
        return self.mode

    def to_dict(self) -> dict:
        d: dict = {"mode": self.mode}
        if self.tau is not None:
            d["tau"] = self.tau
        if self.per_length is not None:
            d["per_length"] = {str(k): tau for k, tau in self.per_length}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AlarmPolicy":
        per_length = d.get("per_length")
        if per_length is not None:
            per_length = tuple(sorted((int(k), float(v)) for k, v in per_length.items()))
        return cls(mode=d["mode"], tau=d.get("tau"), per_length=per_length)


@dataclass(frozen=True)
class PartitionCounts:
    """Case counts of the four (outcome, alarmed) cells."""

    und_al: int = 0
    des_al: int = 0
    und_nal: int = 0
    des_nal: int = 0

    @property
    def total(self) -> int:
        return self.und_al + self.des_al + self.und_nal + self.des_nal

    def to_dict(self) -> dict:
        return {"und_al": self.und_al, "des_al": self.des_al,
                "und_nal": self.und_nal, "des_nal": self.des_nal}


@dataclass(frozen=True)
class ConstantCosts:
    """All-constant cost regime used for the closed-form ROI condition."""

    c_in: float
    c_out: float
    c_com: float = 0.0
    eff: float = 1.0


@dataclass(frozen=True)
class CaseCostRecord:
    case_id: str
    alarm_index: int
    outcome: bool
    cost: float
    intervention: float
    residual_outcome: float
    compensation: float


@dataclass(frozen=True)
class CostReport:
    """Per-case outcomes and the aggregates of one policy run over a log."""

    records: tuple[CaseCostRecord, ...]
    total_cost: float
    avg_cost: float
    as_is_cost: float
    roi: float
    benefit: float
    counts: PartitionCounts

    CSV_COLUMNS = ("case_id", "outcome", "alarm_index", "cost",
                   "cost_intervention", "cost_residual_outcome", "cost_compensation")

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.CSV_COLUMNS)
            for r in self.records:
                writer.writerow([r.case_id, int(r.outcome), r.alarm_index, repr(r.cost),
                                 repr(r.intervention), repr(r.residual_outcome), repr(r.compensation)])

    def summary_dict(self) -> dict:
        return {
            "n_cases": self.counts.total,
            "total_cost": self.total_cost,
            "avg_cost": self.avg_cost,
            "as_is_cost": self.as_is_cost,
            "roi": self.roi,
            "benefit": self.benefit,
            "counts": self.counts.to_dict(),
        }


def _alarm_index_from_scores(scores: Sequence[float], policy: AlarmPolicy, trace_len: int) -> int:
    """First decision position whose score reaches its threshold, else 0.

    Decisions exist only at positions 1..len-1: a completed case cannot be
    alarmed, so length-1 traces always return 0, also under ``always``.
    """
    if policy.mode == "never" or trace_len < 2:
        return 0
    if policy.mode == "always":
        return 1
    for i, score in enumerate(scores, start=1):
        if score >= policy.threshold_for(i):
            return i
    return 0


def alarm_index(trace: Trace, estimator, policy: AlarmPolicy) -> int:
    """Position of the (single) alarm for a trace, 0 when none fires."""
    if policy.mode in ("never", "always") or len(trace) < 2:
        return _alarm_index_from_scores((), policy, len(trace))
    return _alarm_index_from_scores(estimator.prefix_scores(trace), policy, len(trace))


def case_cost(trace: Trace, log: EventLog | None, cost_model: CostModel, alarm_idx: int) -> CaseCostRecord:
    """Evaluate the four-way cost split for one case at a given alarm position."""
    try:
        intervention = residual = compensation = 0.0
        if alarm_idx > 0:
            intervention = cost_model.c_in(alarm_idx, trace, log)
            if trace.outcome:
                residual = (1.0 - cost_model.eff(alarm_idx, trace, log)) * cost_model.c_out(trace, log)
            else:
                compensation = cost_model.c_com(trace, log)
        elif trace.outcome:
            residual = cost_model.c_out(trace, log)
    except CostEvaluationError:
        raise
    except Exception as exc:  # keep the case id in any propagated failure
        raise CostEvaluationError(f"case {trace.case_id!r}: {exc}") from exc
    total = intervention + residual + compensation
    return CaseCostRecord(trace.case_id, alarm_idx, trace.outcome, total,
                          intervention, residual, compensation)


def _build_report(log: EventLog, records: list[CaseCostRecord], cost_model: CostModel) -> CostReport:
    total = 0.0
    as_is = 0.0
    und_al = des_al = und_nal = des_nal = 0
    for trace, rec in zip(log, records):
        total += rec.cost
        if rec.outcome:
            as_is += cost_model.c_out(trace, log)
            if rec.alarm_index > 0:
                und_al += 1
            else:
                und_nal += 1
        elif rec.alarm_index > 0:
            des_al += 1
        else:
            des_nal += 1
    n = len(log)
    roi = as_is - total
    return CostReport(
        records=tuple(records),
        total_cost=total,
        avg_cost=total / n if n else 0.0,
        as_is_cost=as_is,
        roi=roi,
        benefit=roi / n if n else 0.0,
        counts=PartitionCounts(und_al, des_al, und_nal, des_nal),
    )


def log_cost_from_scores(
    log: EventLog,
    scores_by_case: Mapping[str, Sequence[float]],
    policy: AlarmPolicy,
    cost_model: CostModel,
) -> CostReport:
    """Evaluate a policy over a log using precomputed likelihoods."""
    records = []
    for trace in log:
        if policy.mode in ("never", "always"):
            idx = _alarm_index_from_scores((), policy, len(trace))
        else:
            idx = _alarm_index_from_scores(scores_by_case[trace.case_id], policy, len(trace))
        records.append(case_cost(trace, log, cost_model, idx))
    return _build_report(log, records, cost_model)


def log_cost(log: EventLog, estimator, policy: AlarmPolicy, cost_model: CostModel) -> CostReport:
    """Score the log (once) and evaluate a policy; empty logs give a zero report."""
    if len(log) == 0:
        return CostReport((), 0.0, 0.0, 0.0, 0.0, 0.0, PartitionCounts())
    if policy.mode in ("never", "always"):
        scores: Mapping[str, Sequence[float]] = {}
    else:
        scores = estimator.score_log(log)
    return log_cost_from_scores(log, scores, policy, cost_model)


def roi_feasible(counts: PartitionCounts, costs: ConstantCosts) -> bool:
    """Closed-form profitability test for an all-constant cost regime.

    Deploying pays off only when the avoidable outcome cost of the alarmed
    undesired cases exceeds what the alarmed desired cases burn on
    intervention and compensation:

        und_al * (eff * c_out - c_in) > des_al * (c_in + c_com)

    A corollary: eff * c_out > c_in is necessary whenever any desired case
    gets alarmed, since the right-hand side is non-negative.
    """
    for name in ("c_in", "c_out", "c_com"):
        value = getattr(costs, name)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and >= 0, got {value}")
    if not 0.0 <= costs.eff <= 1.0:
        raise ValueError(f"eff must be in [0, 1], got {costs.eff}")
    lhs = counts.und_al * (costs.eff * costs.c_out - costs.c_in)
    rhs = counts.des_al * (costs.c_in + costs.c_com)
    return bool(lhs > rhs)


def prefix_max_scores(scores: Sequence[float]) -> np.ndarray:
    """Running maxima of the decision scores; the alarm position for a global
    threshold tau is the first index where this reaches tau."""
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        return arr
    return np.maximum.accumulate(arr)
