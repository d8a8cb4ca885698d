"""Pure log-to-log preprocessing transforms.

The pipeline applies them in this order: cut trivially-known suffixes, then
length truncation, then (after splitting) rare-category folding fitted on the
training part only, then missing-value imputation.
"""
from __future__ import annotations

import math
from collections import Counter

from .model import Event, EventLog, Trace

OTHER_LABEL = "other"
MISSING_LABEL = "missing"
_RESERVED = frozenset({OTHER_LABEL, MISSING_LABEL})


def nearest_rank_cutoff(lengths: list[int], percentile: float) -> int:
    """Nearest-rank percentile over a sorted multiset of lengths."""
    ordered = sorted(lengths)
    rank = max(1, math.ceil(percentile / 100.0 * len(ordered)))
    return ordered[rank - 1]


def truncate_log(log: EventLog, percentile: float) -> EventLog:
    """Cut every trace longer than the percentile-rank length; labels kept."""
    if not 0 < percentile <= 100:
        raise ValueError(f"percentile must be in (0, 100], got {percentile}")
    if len(log) == 0:
        return log
    cutoff = nearest_rank_cutoff(log.lengths(), percentile)
    traces = []
    for trace in log:
        if len(trace) <= cutoff:
            traces.append(trace)
        else:
            traces.append(Trace(trace.case_id, trace.events[:cutoff], trace.case_attrs, trace.outcome))
    return EventLog(tuple(traces))


class RareCategoryFolder:
    """Replace infrequent categorical values with the reserved ``other`` label.

    ``fit`` counts values on one log (event payloads per occurrence, case
    attributes once per trace) and keeps those seen at least ``min_count``
    times. ``transform`` maps everything else, including values never seen at
    fit time, to ``other``. Reserved labels are excluded from the tally and
    always kept, which makes the transform idempotent.
    """

    def __init__(self, min_count: int = 10):
        if min_count < 0:
            raise ValueError(f"min_count must be >= 0, got {min_count}")
        self.min_count = min_count
        self.keep_event_: dict[str, frozenset] | None = None
        self.keep_case_: dict[str, frozenset] | None = None

    def fit(self, log: EventLog) -> "RareCategoryFolder":
        event_counts: Counter = Counter()
        case_counts: Counter = Counter()
        for trace in log:
            for ev in trace.events:
                for attr, value in ev.cat.items():
                    if value not in _RESERVED:
                        event_counts[(attr, value)] += 1
            for attr, value in trace.case_attrs.items():
                if isinstance(value, str) and value not in _RESERVED:
                    case_counts[(attr, value)] += 1
        self.keep_event_ = self._keep_sets(event_counts)
        self.keep_case_ = self._keep_sets(case_counts)
        return self

    def _keep_sets(self, counts: Counter) -> dict[str, frozenset]:
        keep: dict[str, set] = {}
        for (attr, value), n in counts.items():
            if n >= self.min_count:
                keep.setdefault(attr, set()).add(value)
        return {attr: frozenset(values) for attr, values in keep.items()}

    def transform(self, log: EventLog) -> EventLog:
        if self.keep_event_ is None:
            raise RuntimeError("RareCategoryFolder is not fitted")
        traces = []
        for trace in log:
            events = tuple(
                Event(ev.case_id, ev.activity, ev.timestamp,
                      {a: self._map(self.keep_event_, a, v) for a, v in ev.cat.items()},
                      ev.num)
                for ev in trace.events
            )
            attrs = {
                a: self._map(self.keep_case_, a, v) if isinstance(v, str) else v
                for a, v in trace.case_attrs.items()
            }
            traces.append(Trace(trace.case_id, events, attrs, trace.outcome))
        return EventLog(tuple(traces))

    def _map(self, keep: dict[str, frozenset], attr: str, value: str) -> str:
        if value in _RESERVED or value in keep.get(attr, frozenset()):
            return value
        return OTHER_LABEL


def fold_rare_categories(log: EventLog, min_count: int) -> EventLog:
    """One-pass folding: counts computed on ``log`` itself, then applied."""
    return RareCategoryFolder(min_count).fit(log).transform(log)


def impute_missing(log: EventLog) -> EventLog:
    """Fill missing event payload values by carrying the most recent preceding
    value within the trace; leading gaps become 0 (numeric) or ``missing``
    (categorical). The attribute universe is everything observed in the log,
    mirroring the column semantics of tabular sources.
    """
    cat_names: set[str] = set()
    num_names: set[str] = set()
    for trace in log:
        for ev in trace.events:
            cat_names.update(ev.cat)
            num_names.update(ev.num)
    cat_order = sorted(cat_names)
    num_order = sorted(num_names)

    traces = []
    for trace in log:
        last_cat: dict[str, str] = {}
        last_num: dict[str, float] = {}
        events = []
        for ev in trace.events:
            cat = {}
            for name in cat_order:
                if name in ev.cat:
                    last_cat[name] = ev.cat[name]
                cat[name] = last_cat.get(name, MISSING_LABEL)
            num = {}
            for name in num_order:
                if name in ev.num:
                    last_num[name] = ev.num[name]
                num[name] = last_num.get(name, 0.0)
            events.append(Event(ev.case_id, ev.activity, ev.timestamp, cat, num))
        traces.append(Trace(trace.case_id, tuple(events), trace.case_attrs, trace.outcome))
    return EventLog(tuple(traces))


def cut_trivially_known(log: EventLog, trigger_rules) -> EventLog:
    """Truncate each trace right before its first outcome-revealing activity.

    ``trigger_rules`` is a possibly empty collection of activity labels whose
    occurrence makes the case label obvious. Traces whose first event already
    triggers are dropped.
    """
    triggers = frozenset(trigger_rules)
    if not triggers:
        return log
    traces = []
    for trace in log:
        cut_at = len(trace)
        for i, ev in enumerate(trace.events):
            if ev.activity in triggers:
                cut_at = i
                break
        if cut_at == 0:
            continue
        if cut_at == len(trace):
            traces.append(trace)
        else:
            traces.append(Trace(trace.case_id, trace.events[:cut_at], trace.case_attrs, trace.outcome))
    return EventLog(tuple(traces))
