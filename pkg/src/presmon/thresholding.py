"""Empirical threshold search: minimize realized cost on a held-out log.

Likelihoods are predicted once per prefix and cached. The search grid over
[0, 1] is augmented with every distinct predicted likelihood, which makes the
search exact over all achievable alarm sets (the cost is piecewise constant
in the threshold, changing only where it crosses a prediction), and a
golden-section pass refines around the best grid point. An explicit
never-alarm candidate is always evaluated, recorded as tau = inf in the
search trace, because predictions can round to exactly 1.0 and no threshold
in [0, 1] is guaranteed to silence them. Cost ties resolve to the largest
threshold: fewer interventions at equal cost.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .alarm import AlarmPolicy, case_cost, prefix_max_scores
from .cost_model import CostModel
from .eventlog.model import EventLog
from .exceptions import ThresholdSearchError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_REFINE_ITERS = 24


@dataclass(frozen=True)
class ThresholdSearchResult:
    best_policy: AlarmPolicy
    best_cost: float
    evaluated: tuple[tuple[float, float], ...]  # (tau, cost); tau = inf marks never-alarm
    seed: int = 0

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tau", "cost"])
            for tau, cost in self.evaluated:
                writer.writerow([repr(tau), repr(cost)])


def score_log(log: EventLog, estimator) -> dict[str, np.ndarray]:
    """Predict and cache the likelihood at every decision prefix of a log."""
    return estimator.score_log(log)


class _CostCurve:
    """Per-case alarm-position cost tables for fast exact global-tau evaluation.

    For each case the table holds the realized cost for every possible alarm
    position (index 0 means no alarm); the alarm position of a global
    threshold is found on the running maxima of the cached scores. Entries
    are computed through :func:`case_cost`, so totals match a direct log
    evaluation bit for bit.
    """

    def __init__(self, log: EventLog, scores: Mapping[str, Sequence[float]], cost_model: CostModel):
        self.cases = []
        for trace in log:
            s = np.asarray(scores[trace.case_id], dtype=float)
            table = np.array(
                [case_cost(trace, log, cost_model, idx).cost for idx in range(0, s.size + 1)]
            )
            self.cases.append((prefix_max_scores(s), table))

    def cost_many(self, taus: np.ndarray) -> np.ndarray:
        totals = np.zeros(taus.size)
        for running_max, table in self.cases:
            k = running_max.size
            if k == 0:
                totals += table[0]
                continue
            idx = np.searchsorted(running_max, taus, side="left")
            fired = idx < k
            totals += table[np.where(fired, idx + 1, 0)]
        return totals

    def cost_at(self, tau: float) -> float:
        return float(self.cost_many(np.array([tau]))[0])

    @property
    def never_cost(self) -> float:
        total = 0.0
        for _, table in self.cases:
            total += table[0]
        return total

    def all_scores(self) -> np.ndarray:
        if not self.cases:
            return np.empty(0)
        return np.concatenate([m for m, _ in self.cases])


def _pick_best(evaluated: list[tuple[float, float]]) -> tuple[float, float]:
    """Minimum cost, ties broken toward the largest threshold (inf = never)."""
    best_cost = min(cost for _, cost in evaluated)
    best_tau = max(tau for tau, cost in evaluated if cost == best_cost)
    return best_tau, best_cost


def _search_candidates(curve: _CostCurve, resolution: int) -> list[tuple[float, float]]:
    grid = np.linspace(0.0, 1.0, resolution)
    cands = np.unique(np.concatenate([grid, curve.all_scores()]))
    cands = cands[(cands >= 0.0) & (cands <= 1.0)]
    costs = curve.cost_many(cands)
    evaluated = list(zip(cands.tolist(), costs.tolist()))

    # Local golden-section refinement around the best candidate. The cost is
    # piecewise constant, so this cannot beat the exact score candidates; it
    # documents the plateau around the optimum in the search trace.
    best_i = int(np.argmin(costs))
    lo = cands[best_i - 1] if best_i > 0 else 0.0
    hi = cands[best_i + 1] if best_i + 1 < cands.size else 1.0
    a, b = float(lo), float(hi)
    for _ in range(_REFINE_ITERS):
        m1 = b - _GOLDEN * (b - a)
        m2 = a + _GOLDEN * (b - a)
        c1, c2 = curve.cost_at(m1), curve.cost_at(m2)
        evaluated.append((m1, c1))
        evaluated.append((m2, c2))
        if c1 < c2:
            b = m2
        else:
            a = m1
    evaluated.append((math.inf, curve.never_cost))
    return evaluated


def find_global_threshold(
    thres_log: EventLog,
    estimator,
    cost_model: CostModel,
    resolution: int = 101,
    seed: int = 0,
    scores: Mapping[str, Sequence[float]] | None = None,
) -> ThresholdSearchResult:
    """Search the single threshold minimizing total cost on the thresholding log."""
    if len(thres_log) == 0:
        raise ThresholdSearchError("thresholding log is empty")
    if resolution < 2:
        raise ThresholdSearchError(f"resolution must be >= 2 grid points, got {resolution}")
    if scores is None:
        scores = score_log(thres_log, estimator)
    curve = _CostCurve(thres_log, scores, cost_model)
    evaluated = _search_candidates(curve, resolution)
    best_tau, best_cost = _pick_best(evaluated)
    policy = AlarmPolicy.never() if math.isinf(best_tau) else AlarmPolicy.global_threshold(best_tau)
    return ThresholdSearchResult(policy, best_cost, tuple(evaluated), seed)


class _JointEvaluator:
    """Joint cost of per-position thresholds over cached scores."""

    def __init__(self, log: EventLog, scores: Mapping[str, Sequence[float]], cost_model: CostModel):
        self.cases = []
        for trace in log:
            s = np.asarray(scores[trace.case_id], dtype=float)
            table = np.array(
                [case_cost(trace, log, cost_model, idx).cost for idx in range(0, s.size + 1)]
            )
            self.cases.append((s, table))

    def cost(self, thresholds: Mapping[int, float], default: float) -> float:
        total = 0.0
        for s, table in self.cases:
            idx = 0
            for i in range(s.size):
                if s[i] >= thresholds.get(i + 1, default):
                    idx = i + 1
                    break
            total += table[idx]
        return total

    def lengths_present(self) -> list[int]:
        ks: set[int] = set()
        for s, _ in self.cases:
            ks.update(range(1, s.size + 1))
        return sorted(ks)

    def scores_at(self, k: int) -> np.ndarray:
        vals = [s[k - 1] for s, _ in self.cases if s.size >= k]
        return np.asarray(vals)


def find_per_length_thresholds(
    thres_log: EventLog,
    estimator,
    cost_model: CostModel,
    resolution: int = 101,
    seed: int = 0,
    scores: Mapping[str, Sequence[float]] | None = None,
) -> ThresholdSearchResult:
    """Optimize one threshold per decision position.

    Positions are refined one at a time starting from the global optimum, so
    the result never costs more than the single-threshold policy on the
    thresholding log. The global threshold remains the default for positions
    not present in the log. Kept for comparison; the single global threshold
    is the recommended policy.
    """
    if len(thres_log) == 0:
        raise ThresholdSearchError("thresholding log is empty")
    if resolution < 2:
        raise ThresholdSearchError(f"resolution must be >= 2 grid points, got {resolution}")
    if scores is None:
        scores = score_log(thres_log, estimator)
    best_global = find_global_threshold(thres_log, estimator, cost_model,
                                        resolution, seed, scores=scores)
    default = 1.0 if best_global.best_policy.mode == "never" else best_global.best_policy.tau

    ev = _JointEvaluator(thres_log, scores, cost_model)
    grid = np.linspace(0.0, 1.0, resolution)
    thresholds: dict[int, float] = {k: default for k in ev.lengths_present()}
    evaluated: list[tuple[float, float]] = []
    current = ev.cost(thresholds, default)
    for k in sorted(thresholds):
        cands = np.unique(np.concatenate([grid, ev.scores_at(k), [thresholds[k]]]))
        best_tau, best_cost = thresholds[k], current
        for tau in cands.tolist():
            thresholds[k] = tau
            cost = ev.cost(thresholds, default)
            evaluated.append((tau, cost))
            if cost < best_cost or (cost == best_cost and tau > best_tau):
                best_tau, best_cost = tau, cost
        thresholds[k] = best_tau
        current = best_cost

    if best_global.best_cost < current:
        return ThresholdSearchResult(best_global.best_policy, best_global.best_cost,
                                     tuple(evaluated), seed)
    policy = AlarmPolicy.per_length_thresholds(thresholds, default)
    return ThresholdSearchResult(policy, current, tuple(evaluated), seed)
