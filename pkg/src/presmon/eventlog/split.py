"""Temporal train / thresholding / test split."""
from __future__ import annotations

import warnings

import numpy as np

from ..exceptions import SplitError
from .model import EventLog, SplitLogs, Trace


def temporal_split(
    log: EventLog,
    train_frac: float = 0.64,
    thres_frac: float = 0.16,
    seed: int = 0,
) -> SplitLogs:
    """Split a log by case start time into train, thresholding and test parts.

    Cases are ordered by their first event; the earliest ``train_frac +
    thres_frac`` share forms a pool that is divided uniformly at random
    (seeded) into train and thresholding cases, the remainder is the test set.
    Events of train/thres cases that start at or after the earliest test case
    are discarded so no future information leaks backwards; traces emptied by
    the discard are dropped.
    """
    if train_frac <= 0 or thres_frac <= 0:
        raise ValueError("split fractions must be positive")
    if train_frac + thres_frac >= 1:
        raise ValueError("train_frac + thres_frac must be < 1")
    n = len(log)
    if n < 3:
        raise SplitError(f"need at least 3 cases to split, got {n}")

    order = sorted(range(n), key=lambda i: (log.traces[i].start_time, i))
    n_pool = int(round((train_frac + thres_frac) * n))
    n_pool = min(max(n_pool, 1), n - 1)
    pool, test_idx = order[:n_pool], order[n_pool:]

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_pool)
    n_train = min(int(round(train_frac * n)), n_pool)
    train_set = {pool[i] for i in perm[:n_train]}
    train_idx = [i for i in pool if i in train_set]
    thres_idx = [i for i in pool if i not in train_set]

    test_traces = tuple(log.traces[i] for i in test_idx)
    cutoff = min(t.start_time for t in test_traces) if test_traces else float("inf")

    def clipped(indices) -> EventLog:
        kept = []
        for i in indices:
            trace = log.traces[i]
            events = tuple(ev for ev in trace.events if ev.timestamp < cutoff)
            if events:
                kept.append(Trace(trace.case_id, events, trace.case_attrs, trace.outcome))
        return EventLog(tuple(kept))

    split = SplitLogs(train=clipped(train_idx), thres=clipped(thres_idx), test=EventLog(test_traces))
    for name, part in (("train", split.train), ("thres", split.thres), ("test", split.test)):
        if len(part) == 0:
            warnings.warn(f"temporal_split produced an empty {name} partition", stacklevel=2)
    return split
