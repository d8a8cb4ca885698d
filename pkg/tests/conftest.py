import numpy as np
import pytest

from presmon.eventlog.model import Event, EventLog, Trace


def make_trace(case_id, activities, outcome=False, t0=1000.0, gap=60.0,
               case_attrs=None, cat=None, num=None):
    """Small hand-rolled trace: evenly spaced events, optional shared payload."""
    events = tuple(
        Event(case_id, act, t0 + i * gap, dict(cat or {}), dict(num or {}))
        for i, act in enumerate(activities)
    )
    return Trace(case_id, events, dict(case_attrs or {}), outcome)


def random_log(rng: np.random.Generator, n_traces=6, max_len=6, activities=("a", "b", "c"),
               amount_attr=False) -> EventLog:
    """Random small log for property tests; timestamps stay sane and sorted."""
    traces = []
    for i in range(n_traces):
        length = int(rng.integers(1, max_len + 1))
        t = float(rng.uniform(0, 1e6))
        events = []
        for j in range(length):
            t += float(rng.uniform(0, 3600))
            num = {"amount": float(rng.uniform(0, 100))} if amount_attr else {}
            events.append(Event(f"c{i}", str(rng.choice(activities)), t, {}, num))
        traces.append(Trace(f"c{i}", tuple(events), {}, bool(rng.random() < 0.5)))
    return EventLog(tuple(traces))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
