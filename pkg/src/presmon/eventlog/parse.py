"""CSV ingestion: column-role schema, timestamp parsing and log assembly."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import TextIO, Union

import yaml

from ..exceptions import DataError, RowError, SchemaError
from .model import Event, EventLog, Trace

Source = Union[str, Path, TextIO]


@dataclass(frozen=True)
class LogSchema:
    """Column roles for a CSV event log.

    ``pos_label_value`` is the label-column value that marks the undesired
    outcome; comparison is on the stripped string.
    """

    case_id_col: str
    activity_col: str
    timestamp_col: str
    label_col: str
    cat_event_cols: tuple[str, ...] = ()
    num_event_cols: tuple[str, ...] = ()
    cat_case_cols: tuple[str, ...] = ()
    num_case_cols: tuple[str, ...] = ()
    pos_label_value: str = "1"

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("cat_event_cols", "num_event_cols", "cat_case_cols", "num_case_cols"):
            d[key] = list(d[key])
        return d


def load_schema_config(path: str | Path) -> LogSchema:
    """Read a schema config file (YAML; JSON works as a YAML subset)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"schema config {path} must be a mapping")
    known = {f for f in LogSchema.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise SchemaError(f"unknown schema config keys: {sorted(unknown)}")
    for key in ("case_id_col", "activity_col", "timestamp_col", "label_col"):
        if key not in raw:
            raise SchemaError(f"schema config missing required key {key!r}")
    for key in ("cat_event_cols", "num_event_cols", "cat_case_cols", "num_case_cols"):
        if key in raw:
            raw[key] = tuple(raw[key])
    return LogSchema(**raw)


def save_schema_config(schema: LogSchema, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(schema.to_dict(), fh, sort_keys=False)


def parse_timestamp(text: str) -> float:
    """Parse an epoch-seconds number or an ISO-8601 timestamp to epoch seconds.

    Naive ISO timestamps are interpreted as UTC; a trailing ``Z`` is accepted.
    """
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    iso = text.replace("Z", "+00:00") if text.endswith("Z") else text
    try:
        dt = datetime.fromisoformat(iso)
    except ValueError as exc:
        raise ValueError(f"unparseable timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


@dataclass
class _CaseAccumulator:
    rows: list = field(default_factory=list)  # (order, timestamp, event)
    label: str | None = None
    case_attrs: dict = field(default_factory=dict)


def parse_log(source: Source, schema: LogSchema, delimiter: str = ",") -> EventLog:
    """Parse a CSV event log into an :class:`EventLog`.

    Events are grouped by case id and sorted by timestamp, stable on ties by
    input order. The outcome label must be consistent within each case. Empty
    cells are treated as missing payload values.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return _parse_stream(fh, schema, delimiter)
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return _parse_stream(source, schema, delimiter)
    raise TypeError(f"unsupported source type {type(source)!r}")


def _parse_stream(fh: TextIO, schema: LogSchema, delimiter: str) -> EventLog:
    reader = csv.DictReader(fh, delimiter=delimiter)
    header = reader.fieldnames
    if header is None:
        return EventLog(())
    required = [schema.case_id_col, schema.activity_col, schema.timestamp_col, schema.label_col]
    declared = list(schema.cat_event_cols) + list(schema.num_event_cols) \
        + list(schema.cat_case_cols) + list(schema.num_case_cols)
    missing = [c for c in required + declared if c not in header]
    if missing:
        raise SchemaError(f"missing columns in CSV header: {missing}")

    cases: dict[str, _CaseAccumulator] = {}
    for order, row in enumerate(reader):
        line_no = reader.line_num
        case_id = (row[schema.case_id_col] or "").strip()
        if not case_id:
            raise RowError(line_no, "empty case id")
        activity = (row[schema.activity_col] or "").strip()
        if not activity:
            raise RowError(line_no, "empty activity")
        try:
            ts = parse_timestamp(row[schema.timestamp_col] or "")
        except ValueError as exc:
            raise RowError(line_no, str(exc)) from exc
        if ts < 0:
            raise RowError(line_no, f"negative timestamp {ts}")

        cat = {}
        for col in schema.cat_event_cols:
            val = (row[col] or "").strip()
            if val:
                cat[col] = val
        num = {}
        for col in schema.num_event_cols:
            raw = (row[col] or "").strip()
            if raw:
                try:
                    num[col] = float(raw)
                except ValueError as exc:
                    raise RowError(line_no, f"non-numeric value {raw!r} in column {col!r}") from exc

        acc = cases.setdefault(case_id, _CaseAccumulator())
        acc.rows.append((order, ts, Event(case_id, activity, ts, cat, num)))

        label = (row[schema.label_col] or "").strip()
        if label:
            if acc.label is None:
                acc.label = label
            elif acc.label != label:
                raise DataError(
                    f"case {case_id!r} has conflicting outcome labels {acc.label!r} and {label!r}"
                )
        for col in schema.cat_case_cols:
            val = (row[col] or "").strip()
            if val and col not in acc.case_attrs:
                acc.case_attrs[col] = val
        for col in schema.num_case_cols:
            raw = (row[col] or "").strip()
            if raw and col not in acc.case_attrs:
                try:
                    acc.case_attrs[col] = float(raw)
                except ValueError as exc:
                    raise RowError(line_no, f"non-numeric value {raw!r} in column {col!r}") from exc

    traces = []
    for case_id, acc in cases.items():
        if acc.label is None:
            raise DataError(f"case {case_id!r} has no outcome label")
        acc.rows.sort(key=lambda item: item[1])  # stable: ties keep input order
        events = tuple(ev for _, _, ev in acc.rows)
        traces.append(Trace(case_id, events, acc.case_attrs, acc.label == schema.pos_label_value))
    return EventLog(tuple(traces))


def write_log_csv(log: EventLog, path: str | Path, schema: LogSchema | None = None) -> LogSchema:
    """Write a log back to CSV in a layout that :func:`parse_log` accepts.

    Returns the schema describing the written columns (a fresh one is derived
    from the data when none is given). Missing payload values become empty
    cells; timestamps are written as epoch seconds.
    """
    if schema is None:
        cat_ev, num_ev, cat_case, num_case = set(), set(), set(), set()
        for trace in log:
            for ev in trace.events:
                cat_ev.update(ev.cat)
                num_ev.update(ev.num)
            for name, value in trace.case_attrs.items():
                (cat_case if isinstance(value, str) else num_case).add(name)
        schema = LogSchema(
            case_id_col="case_id",
            activity_col="activity",
            timestamp_col="timestamp",
            label_col="label",
            cat_event_cols=tuple(sorted(cat_ev)),
            num_event_cols=tuple(sorted(num_ev)),
            cat_case_cols=tuple(sorted(cat_case)),
            num_case_cols=tuple(sorted(num_case)),
            pos_label_value="1",
        )
    columns = (
        [schema.case_id_col, schema.activity_col, schema.timestamp_col, schema.label_col]
        + list(schema.cat_event_cols) + list(schema.num_event_cols)
        + list(schema.cat_case_cols) + list(schema.num_case_cols)
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for trace in log:
            label = schema.pos_label_value if trace.outcome else "0"
            for ev in trace.events:
                row = [trace.case_id, ev.activity, repr(ev.timestamp), label]
                row += [ev.cat.get(c, "") for c in schema.cat_event_cols]
                row += [repr(ev.num[c]) if c in ev.num else "" for c in schema.num_event_cols]
                row += [str(trace.case_attrs.get(c, "")) for c in schema.cat_case_cols]
                row += [
                    repr(float(trace.case_attrs[c])) if c in trace.case_attrs else ""
                    for c in schema.num_case_cols
                ]
                writer.writerow(row)
    return schema


def schema_to_json(schema: LogSchema) -> str:
    return json.dumps(schema.to_dict(), indent=2)
