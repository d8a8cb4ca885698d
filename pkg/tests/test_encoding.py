from datetime import datetime, timezone

import numpy as np
import pytest

from presmon.encoding import AGG_STATS, DERIVED_FEATURES, EncodingSchema, PrefixEncoder, encode, fit_schema
from presmon.eventlog.model import Event, EventLog, Prefix, Trace
from presmon.exceptions import SchemaError

from conftest import make_trace, random_log


def _fit(log):
    return PrefixEncoder().fit(log)


def _names_with(enc, head):
    return [n for n in enc.feature_names_ if n.startswith(head)]


def test_activity_block_width():
    log = EventLog((make_trace("c", ["a", "b", "a"]),))
    enc = _fit(log)
    assert _names_with(enc, "act:") == ["act:a", "act:b"]


def test_numeric_attribute_gets_five_aggregates():
    log = EventLog((make_trace("c", ["a"], num={"amt": 1.0}),))
    enc = _fit(log)
    # layout rule: one feature per statistic for each numeric event attribute
    assert _names_with(enc, "ev:amt:") == [f"ev:amt:{s}" for s in AGG_STATS]
    assert len(AGG_STATS) == 5


def test_activity_counts_by_hand():
    log = EventLog((make_trace("c", ["a", "b", "a"]),))
    enc = _fit(log)
    vec = enc.encode(Prefix(log.traces[0], 3))
    names = enc.feature_names_
    assert vec[names.index("act:a")] == 2
    assert vec[names.index("act:b")] == 1


def test_unseen_activity_ignored():
    enc = _fit(EventLog((make_trace("c", ["a", "b"]),)))
    other = make_trace("z", ["zzz", "a"])
    vec = enc.encode(Prefix(other, 2))
    names = enc.feature_names_
    assert vec[names.index("act:a")] == 1
    assert vec[names.index("act:b")] == 0
    assert vec[: len(_names_with(enc, "act:"))].sum() == 1  # zzz contributes nothing


def test_numeric_aggregates_by_hand():
    trace = Trace("c", (
        Event("c", "a", 100.0, {}, {"x": 3.0}),
        Event("c", "b", 200.0, {}, {"x": 5.0}),
    ))
    enc = _fit(EventLog((trace,)))
    vec = enc.encode(Prefix(trace, 2))
    names = enc.feature_names_
    got = [vec[names.index(f"ev:x:{s}")] for s in AGG_STATS]
    assert got == [3.0, 5.0, 4.0, 8.0, 1.0]  # min,max,mean,sum,population std


def test_single_observation_std_is_zero():
    trace = Trace("c", (Event("c", "a", 100.0, {}, {"x": 3.0}),))
    enc = _fit(EventLog((trace,)))
    vec = enc.encode(Prefix(trace, 1))
    assert vec[enc.feature_names_.index("ev:x:std")] == 0.0


def test_derived_features_boundary_and_calendar():
    # 2021-03-02 10:00:00 UTC is a Tuesday
    t0 = datetime(2021, 3, 2, 10, 0, 0, tzinfo=timezone.utc).timestamp()
    trace = Trace("c", (Event("c", "a", t0), Event("c", "b", t0 + 90.0)))
    enc = _fit(EventLog((trace,)))
    names = enc.feature_names_
    v1 = enc.encode(Prefix(trace, 1))
    assert v1[names.index("derived:event_number")] == 1
    assert v1[names.index("derived:time_since_start")] == 0.0
    assert v1[names.index("derived:time_since_last")] == 0.0
    assert v1[names.index("derived:hour")] == 10
    assert v1[names.index("derived:weekday")] == 1
    assert v1[names.index("derived:month")] == 3
    v2 = enc.encode(Prefix(trace, 2))
    assert v2[names.index("derived:event_number")] == 2
    assert v2[names.index("derived:time_since_start")] == 90.0
    assert v2[names.index("derived:time_since_last")] == 90.0


def test_case_attributes_one_hot_and_raw():
    trace = make_trace("c", ["a"], case_attrs={"channel": "web", "asset": 42.0})
    enc = _fit(EventLog((trace,)))
    vec = enc.encode(Prefix(trace, 1))
    names = enc.feature_names_
    assert vec[names.index("case:channel=web")] == 1.0
    assert vec[names.index("case:asset")] == 42.0
    # unseen case value: all one-hot positions stay zero
    other = make_trace("z", ["a"], case_attrs={"channel": "fax", "asset": 1.0})
    vec2 = enc.encode(Prefix(other, 1))
    assert vec2[names.index("case:channel=web")] == 0.0


def test_tie_permutation_keeps_aggregation_blocks(rng):
    # two events share a timestamp; swapping them must not move blocks 1-3
    e1 = Event("c", "a", 100.0, {"r": "x"}, {"v": 1.0})
    e2 = Event("c", "b", 100.0, {"r": "y"}, {"v": 9.0})
    t_a = Trace("c", (e1, e2))
    t_b = Trace("c", (e2, e1))
    enc = _fit(EventLog((t_a,)))
    agg_width = len([n for n in enc.feature_names_ if not n.startswith(("case:", "derived:"))])
    va = enc.encode(Prefix(t_a, 2))[:agg_width]
    vb = enc.encode(Prefix(t_b, 2))[:agg_width]
    assert np.array_equal(va, vb)


def test_prefix_causality_suffix_mutation(rng):
    base = make_trace("c", ["a", "b", "c", "d"], num={"v": 1.0})
    mutated = Trace("c", base.events[:2] + (
        Event("c", "zzz", base.events[2].timestamp, {}, {"v": 999.0}),
        Event("c", "qqq", base.events[3].timestamp, {}, {"v": -999.0}),
    ), {}, True)
    enc = _fit(EventLog((base,)))
    for k in (1, 2):
        assert np.array_equal(enc.encode(Prefix(base, k)), enc.encode(Prefix(mutated, k)))


def test_constant_width_and_finite(rng):
    log = random_log(rng, n_traces=10, max_len=8, amount_attr=True)
    enc = _fit(log)
    prefixes = [Prefix(t, k) for t in log for k in range(1, len(t) + 1)]
    X = enc.transform(prefixes)
    assert X.shape == (len(prefixes), enc.schema_.width)
    assert np.isfinite(X).all()


def test_schema_roundtrip(tmp_path):
    log = EventLog((make_trace("c", ["a", "b"], case_attrs={"channel": "web"},
                               cat={"r": "x"}, num={"v": 2.0}),))
    schema = fit_schema(log)
    path = tmp_path / "schema.json"
    schema.save(path)
    assert EncodingSchema.load(path) == schema
    assert len(schema.feature_names) == schema.width
    assert schema.feature_names[-len(DERIVED_FEATURES):] == tuple(
        f"derived:{n}" for n in DERIVED_FEATURES)


def test_module_level_encode_matches_class():
    log = EventLog((make_trace("c", ["a", "b"]),))
    enc = _fit(log)
    p = Prefix(log.traces[0], 2)
    assert np.array_equal(encode(p, enc.schema_), enc.encode(p))


def test_fit_on_empty_log_is_schema_error():
    with pytest.raises(SchemaError):
        PrefixEncoder().fit(EventLog(()))
