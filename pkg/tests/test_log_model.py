import numpy as np
import pytest

from presmon.eventlog.model import Event, EventLog, Prefix, Trace, decision_prefixes, prefix

from conftest import make_trace, random_log


def test_prefix_of_length_two():
    trace = make_trace("c1", ["a", "b", "c", "d", "e"])
    p = prefix(trace, 2)
    assert [e.activity for e in p.events] == ["a", "b"]


def test_prefix_full_length_is_whole_trace():
    trace = make_trace("c1", ["a", "b", "c"])
    assert prefix(trace, len(trace)).events == trace.events


def test_prefix_length_one_is_first_event():
    trace = make_trace("c1", ["a", "b", "c"])
    p = prefix(trace, 1)
    assert len(p.events) == 1
    assert p.events[0] == trace.events[0]


@pytest.mark.parametrize("k", [0, 4, -1])
def test_prefix_out_of_range(k):
    trace = make_trace("c1", ["a", "b", "c"])
    with pytest.raises(ValueError):
        prefix(trace, k)


def test_prefix_concat_identity(rng):
    # prefix + suffix reconstructs the original sequence for every valid k
    for _ in range(50):
        log = random_log(rng, n_traces=3)
        for trace in log:
            for k in range(1, len(trace) + 1):
                p = prefix(trace, k)
                assert p.events + trace.events[k:] == trace.events


def test_decision_prefixes_exclude_last_event():
    trace = make_trace("c1", ["a", "b", "c", "d"])
    assert [p.k for p in decision_prefixes(trace)] == [1, 2, 3]
    assert decision_prefixes(make_trace("c2", ["a"])) == []


def test_event_invariants():
    with pytest.raises(ValueError):
        Event("c", "", 0.0)
    with pytest.raises(ValueError):
        Event("c", "a", -1.0)
    with pytest.raises(ValueError):
        Event("c", "a", float("nan"))


def test_trace_invariants():
    with pytest.raises(ValueError):
        Trace("c", ())
    with pytest.raises(ValueError):
        Trace("c", (Event("c", "a", 100.0), Event("c", "b", 50.0)))
    # equal timestamps are fine
    Trace("c", (Event("c", "a", 100.0), Event("c", "b", 100.0)))


def test_log_rejects_duplicate_case_ids():
    t1 = make_trace("c1", ["a"])
    t2 = make_trace("c1", ["b"])
    with pytest.raises(ValueError):
        EventLog((t1, t2))


def test_prefix_is_view_not_copy():
    trace = make_trace("c1", ["a", "b", "c"])
    p = Prefix(trace, 2)
    assert p.trace is trace
    assert p.last is trace.events[1]
    assert p.case_id == "c1"
