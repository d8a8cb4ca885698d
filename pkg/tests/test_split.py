import numpy as np
import pytest

from presmon.eventlog.model import Event, EventLog, Trace
from presmon.eventlog.split import temporal_split
from presmon.exceptions import SplitError

from conftest import make_trace


def _sequential_log(n, events_per_case=1, gap=1000.0):
    # strictly increasing single-burst cases so the overlap discard is empty
    traces = []
    for i in range(n):
        t0 = i * gap
        events = tuple(Event(f"c{i}", "a", t0 + j) for j in range(events_per_case))
        traces.append(Trace(f"c{i}", events, {}, i % 2 == 0))
    return EventLog(tuple(traces))


def test_100_cases_give_64_16_20():
    split = temporal_split(_sequential_log(100), seed=3)
    assert (len(split.train), len(split.thres), len(split.test)) == (64, 16, 20)


def test_partitions_case_ids():
    log = _sequential_log(50)
    split = temporal_split(log, seed=1)
    ids = set(split.train.case_ids) | set(split.thres.case_ids) | set(split.test.case_ids)
    assert ids == set(log.case_ids)
    assert not set(split.train.case_ids) & set(split.thres.case_ids)
    assert not set(split.train.case_ids) & set(split.test.case_ids)
    assert not set(split.thres.case_ids) & set(split.test.case_ids)


def test_test_set_is_latest_starts():
    log = _sequential_log(50)
    split = temporal_split(log, seed=1)
    latest_start = max(t.start_time for t in split.train.traces + split.thres.traces)
    earliest_test = min(t.start_time for t in split.test)
    assert latest_start < earliest_test


def test_overlap_events_are_discarded():
    # one early case runs long enough to overlap the test period
    overlapper = Trace("long", tuple(Event("long", "a", t) for t in (0.0, 1.0, 9e9)))
    rest = [make_trace(f"c{i}", ["a", "b"], t0=100.0 + i) for i in range(9)]
    log = EventLog((overlapper, *rest))
    split = temporal_split(log, seed=0)
    for part in (split.train, split.thres):
        for trace in part:
            if trace.case_id == "long":
                assert len(trace) == 2  # the 9e9 event fell in the test period


def test_degenerate_shared_timestamp_warns_and_empties():
    log = EventLog(tuple(make_trace(f"c{i}", ["a"], t0=500.0, gap=0.0) for i in range(10)))
    with pytest.warns(UserWarning, match="empty"):
        split = temporal_split(log, seed=0)
    assert len(split.train) == 0 and len(split.thres) == 0
    assert len(split.test) > 0


def test_deterministic_under_seed():
    log = _sequential_log(40)
    a = temporal_split(log, seed=9)
    b = temporal_split(log, seed=9)
    assert a.train.case_ids == b.train.case_ids
    assert a.thres.case_ids == b.thres.case_ids
    assert a.test.case_ids == b.test.case_ids
    c = temporal_split(log, seed=10)
    assert c.train.case_ids != a.train.case_ids  # overwhelmingly likely


def test_too_few_cases():
    with pytest.raises(SplitError):
        temporal_split(_sequential_log(2))


@pytest.mark.parametrize("fracs", [(0.0, 0.2), (0.5, 0.5), (-0.1, 0.2), (0.9, 0.2)])
def test_bad_fractions(fracs):
    with pytest.raises(ValueError):
        temporal_split(_sequential_log(10), *fracs)
