"""Fixed-width prefix featurization.

A prefix is encoded as, in order: activity occurrence counts, categorical
event-payload value counts, per-numeric-attribute aggregates
(min/max/mean/sum/std over the prefix, population std), case attributes
(one-hot categoricals, raw numerics), and derived temporal features of the
prefix (event number, hour/weekday/month of the last event in UTC, seconds
since case start, seconds since the previous event).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .eventlog.model import EventLog, Prefix, Trace
from .exceptions import SchemaError

AGG_STATS = ("min", "max", "mean", "sum", "std")
DERIVED_FEATURES = ("event_number", "hour", "weekday", "month", "time_since_start", "time_since_last")


@dataclass(frozen=True)
class EncodingSchema:
    """Alphabets and layout of the feature vector; fitted from training data only."""

    activity_alphabet: tuple[str, ...]
    cat_event_values: tuple[tuple[str, tuple[str, ...]], ...]
    num_event_attrs: tuple[str, ...]
    cat_case_values: tuple[tuple[str, tuple[str, ...]], ...]
    num_case_attrs: tuple[str, ...]

    @property
    def feature_names(self) -> tuple[str, ...]:
        names = [f"act:{a}" for a in self.activity_alphabet]
        for attr, values in self.cat_event_values:
            names += [f"ev:{attr}={v}" for v in values]
        for attr in self.num_event_attrs:
            names += [f"ev:{attr}:{stat}" for stat in AGG_STATS]
        for attr, values in self.cat_case_values:
            names += [f"case:{attr}={v}" for v in values]
        names += [f"case:{attr}" for attr in self.num_case_attrs]
        names += [f"derived:{name}" for name in DERIVED_FEATURES]
        return tuple(names)

    @property
    def width(self) -> int:
        return len(self.feature_names)

    def to_dict(self) -> dict:
        return {
            "activity_alphabet": list(self.activity_alphabet),
            "cat_event_values": {attr: list(vals) for attr, vals in self.cat_event_values},
            "num_event_attrs": list(self.num_event_attrs),
            "cat_case_values": {attr: list(vals) for attr, vals in self.cat_case_values},
            "num_case_attrs": list(self.num_case_attrs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncodingSchema":
        return cls(
            activity_alphabet=tuple(d["activity_alphabet"]),
            cat_event_values=tuple((a, tuple(v)) for a, v in d["cat_event_values"].items()),
            num_event_attrs=tuple(d["num_event_attrs"]),
            cat_case_values=tuple((a, tuple(v)) for a, v in d["cat_case_values"].items()),
            num_case_attrs=tuple(d["num_case_attrs"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EncodingSchema":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


class PrefixEncoder(BaseEstimator, TransformerMixin):
    """Aggregation encoder with a fit/transform interface.

    ``fit`` collects alphabets from a (preprocessed) training log with
    deterministic lexicographic ordering; ``transform`` maps prefixes to rows
    of a dense matrix. Values outside the fitted alphabets contribute nothing
    instead of raising, since later data may contain unseen labels.
    """

    schema_: EncodingSchema

    def fit(self, X: EventLog | Iterable[Trace], y=None) -> "PrefixEncoder":
        traces = list(X)
        if not traces:
            raise SchemaError("cannot fit an encoding schema on an empty log")
        activities: set[str] = set()
        cat_event: dict[str, set] = {}
        num_event: set[str] = set()
        cat_case: dict[str, set] = {}
        num_case: set[str] = set()
        for trace in traces:
            for ev in trace.events:
                activities.add(ev.activity)
                for attr, value in ev.cat.items():
                    cat_event.setdefault(attr, set()).add(value)
                num_event.update(ev.num)
            for attr, value in trace.case_attrs.items():
                if isinstance(value, str):
                    cat_case.setdefault(attr, set()).add(value)
                else:
                    num_case.add(attr)
        self.schema_ = EncodingSchema(
            activity_alphabet=tuple(sorted(activities)),
            cat_event_values=tuple((a, tuple(sorted(vs))) for a, vs in sorted(cat_event.items())),
            num_event_attrs=tuple(sorted(num_event)),
            cat_case_values=tuple((a, tuple(sorted(vs))) for a, vs in sorted(cat_case.items())),
            num_case_attrs=tuple(sorted(num_case)),
        )
        self._build_index()
        return self

    @classmethod
    def from_schema(cls, schema: EncodingSchema) -> "PrefixEncoder":
        enc = cls()
        enc.schema_ = schema
        enc._build_index()
        return enc

    def _build_index(self) -> None:
        s = self.schema_
        pos = 0
        self._act_index = {a: pos + i for i, a in enumerate(s.activity_alphabet)}
        pos += len(s.activity_alphabet)
        self._cat_event_index = {}
        for attr, values in s.cat_event_values:
            for v in values:
                self._cat_event_index[(attr, v)] = pos
                pos += 1
        self._num_event_pos = {}
        for attr in s.num_event_attrs:
            self._num_event_pos[attr] = pos
            pos += len(AGG_STATS)
        self._cat_case_index = {}
        for attr, values in s.cat_case_values:
            for v in values:
                self._cat_case_index[(attr, v)] = pos
                pos += 1
        self._num_case_pos = {}
        for attr in s.num_case_attrs:
            self._num_case_pos[attr] = pos
            pos += 1
        self._derived_pos = pos
        self._width = pos + len(DERIVED_FEATURES)

    def transform(self, X: Sequence[Prefix]) -> np.ndarray:
        prefixes = list(X)
        out = np.zeros((len(prefixes), self._width))
        for i, p in enumerate(prefixes):
            out[i] = self.encode(p)
        if not np.isfinite(out).all():
            raise ValueError("encoded feature matrix contains non-finite values")
        return out

    def encode(self, p: Prefix) -> np.ndarray:
        vec = np.zeros(self._width)
        events = p.events
        for ev in events:
            idx = self._act_index.get(ev.activity)
            if idx is not None:
                vec[idx] += 1.0
            for attr, value in ev.cat.items():
                idx = self._cat_event_index.get((attr, value))
                if idx is not None:
                    vec[idx] += 1.0
        for attr, base in self._num_event_pos.items():
            values = [ev.num[attr] for ev in events if attr in ev.num]
            if values:
                arr = np.asarray(values)
                vec[base:base + 5] = (arr.min(), arr.max(), arr.mean(), arr.sum(), arr.std())
        attrs = p.trace.case_attrs
        for (attr, value), idx in self._cat_case_index.items():
            if attrs.get(attr) == value:
                vec[idx] = 1.0
        for attr, idx in self._num_case_pos.items():
            value = attrs.get(attr)
            if value is not None and not isinstance(value, str):
                vec[idx] = float(value)
        last = events[-1]
        when = datetime.fromtimestamp(last.timestamp, tz=timezone.utc)
        d = self._derived_pos
        vec[d + 0] = p.k
        vec[d + 1] = when.hour
        vec[d + 2] = when.weekday()
        vec[d + 3] = when.month
        vec[d + 4] = last.timestamp - events[0].timestamp
        vec[d + 5] = last.timestamp - events[-2].timestamp if p.k >= 2 else 0.0
        return vec

    @property
    def feature_names_(self) -> tuple[str, ...]:
        return self.schema_.feature_names


def fit_schema(train_log: EventLog) -> EncodingSchema:
    """Collect encoding alphabets from a training log."""
    return PrefixEncoder().fit(train_log).schema_


def encode(p: Prefix, schema: EncodingSchema) -> np.ndarray:
    """Encode one prefix under a fitted schema."""
    return PrefixEncoder.from_schema(schema).encode(p)
