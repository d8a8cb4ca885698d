from .model import Event, EventLog, Prefix, SplitLogs, Trace, decision_prefixes, prefix
from .parse import LogSchema, load_schema_config, parse_log, parse_timestamp, save_schema_config, write_log_csv
from .preprocess import (
    MISSING_LABEL,
    OTHER_LABEL,
    RareCategoryFolder,
    cut_trivially_known,
    fold_rare_categories,
    impute_missing,
    nearest_rank_cutoff,
    truncate_log,
)
from .split import temporal_split

__all__ = [
    "Event",
    "EventLog",
    "Prefix",
    "SplitLogs",
    "Trace",
    "decision_prefixes",
    "prefix",
    "LogSchema",
    "load_schema_config",
    "parse_log",
    "parse_timestamp",
    "save_schema_config",
    "write_log_csv",
    "MISSING_LABEL",
    "OTHER_LABEL",
    "RareCategoryFolder",
    "cut_trivially_known",
    "fold_rare_categories",
    "impute_missing",
    "nearest_rank_cutoff",
    "truncate_log",
    "temporal_split",
]
