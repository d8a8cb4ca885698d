"""Core event log data model: events, traces, logs, prefixes and split containers.

All types are immutable after construction; every transform in this package
returns a new object, so instances can be shared freely across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

AttrValue = Union[str, float]


@dataclass(frozen=True)
class Event:
    """One recorded step of a case: an activity at a point in time plus payload."""

    case_id: str
    activity: str
    timestamp: float  # epoch seconds
    cat: Mapping[str, str] = field(default_factory=dict)
    num: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.activity:
            raise ValueError("event activity must be non-empty")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"event timestamp must be finite and non-negative, got {self.timestamp!r}")


@dataclass(frozen=True)
class Trace:
    """A finite non-empty event sequence for one case, with its outcome label.

    ``outcome`` is True when the case ended in the undesired way.
    """

    case_id: str
    events: tuple[Event, ...]
    case_attrs: Mapping[str, AttrValue] = field(default_factory=dict)
    outcome: bool = False

    def __post_init__(self):
        if len(self.events) == 0:
            raise ValueError(f"trace {self.case_id!r} has no events")
        ts = [e.timestamp for e in self.events]
        if any(a > b for a, b in zip(ts, ts[1:])):
            raise ValueError(f"trace {self.case_id!r} has decreasing timestamps")

    def __len__(self) -> int:
        return len(self.events)

    @property
    def start_time(self) -> float:
        return self.events[0].timestamp

    @property
    def end_time(self) -> float:
        return self.events[-1].timestamp


@dataclass(frozen=True)
class Prefix:
    """A view of the first ``k`` events of a trace; the underlying trace is shared."""

    trace: Trace
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= len(self.trace):
            raise ValueError(f"prefix length {self.k} out of range 1..{len(self.trace)}")

    @property
    def events(self) -> tuple[Event, ...]:
        return self.trace.events[: self.k]

    @property
    def last(self) -> Event:
        return self.trace.events[self.k - 1]

    @property
    def case_id(self) -> str:
        return self.trace.case_id

    def __len__(self) -> int:
        return self.k


def prefix(trace: Trace, k: int) -> Prefix:
    """Return the length-``k`` prefix of ``trace``.

    Raises ValueError when ``k`` is outside ``1..len(trace)``.
    """
    return Prefix(trace, k)


def decision_prefixes(trace: Trace) -> list[Prefix]:
    """All prefixes on which an alarm decision is made: lengths 1..len-1.

    A completed case cannot be alarmed anymore, so the final event never
    carries a decision; length-1 traces yield no decision points.
    """
    return [Prefix(trace, k) for k in range(1, len(trace))]


@dataclass(frozen=True)
class EventLog:
    """A collection of traces with unique case ids."""

    traces: tuple[Trace, ...] = ()

    def __post_init__(self):
        ids = [t.case_id for t in self.traces]
        if len(set(ids)) != len(ids):
            seen, dupes = set(), set()
            for cid in ids:
                (dupes if cid in seen else seen).add(cid)
            raise ValueError(f"duplicate case ids in log: {sorted(dupes)[:5]}")

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    @property
    def case_ids(self) -> tuple[str, ...]:
        return tuple(t.case_id for t in self.traces)

    def lengths(self) -> list[int]:
        return [len(t) for t in self.traces]


@dataclass(frozen=True)
class SplitLogs:
    """Train / thresholding / test partition of a log."""

    train: EventLog
    thres: EventLog
    test: EventLog
