"""Loader hooks for public benchmark logs.

Only the road-fines log has a loader here; the file is not bundled and must
be fetched separately (see README). The expected format is the preprocessed
outcome-labelled CSV export: semicolon-separated with columns ``Case ID``,
``Activity``, ``Complete Timestamp`` and ``label`` where ``deviant`` marks
the undesired outcome (the fine going to credit collection).
"""
from __future__ import annotations

import os
from pathlib import Path

from .eventlog.model import EventLog
from .eventlog.parse import LogSchema, parse_log

TRAFFIC_FINES_ENV = "PRESMON_TRAFFIC_FINES"
TRAFFIC_FINES_DEFAULT = Path("data/traffic_fines.csv")

TRAFFIC_FINES_SCHEMA = LogSchema(
    case_id_col="Case ID",
    activity_col="Activity",
    timestamp_col="Complete Timestamp",
    label_col="label",
    pos_label_value="deviant",
)


def traffic_fines_path() -> Path:
    return Path(os.environ.get(TRAFFIC_FINES_ENV, TRAFFIC_FINES_DEFAULT))


def load_traffic_fines(path: str | Path | None = None, delimiter: str = ";") -> EventLog:
    """Parse the road-fines CSV; raises FileNotFoundError when absent."""
    path = Path(path) if path is not None else traffic_fines_path()
    if not path.exists():
        raise FileNotFoundError(
            f"road-fines log not found at {path}; set ${TRAFFIC_FINES_ENV} or see README"
        )
    return parse_log(path, TRAFFIC_FINES_SCHEMA, delimiter=delimiter)
