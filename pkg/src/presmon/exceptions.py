"""Exception hierarchy for the presmon package."""


class PresmonError(Exception):
    """Base class for all presmon errors."""


class SchemaError(PresmonError):
    """A CSV schema or encoding schema is invalid or cannot be fitted."""


class RowError(PresmonError):
    """A single input row is malformed; carries the 1-based file line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DataError(PresmonError):
    """Inconsistent data, e.g. conflicting outcome labels within one case."""


class SplitError(PresmonError):
    """The log cannot be split as requested."""


class TrainingError(PresmonError):
    """Training set construction or model fitting failed."""


class DegenerateLabelsError(TrainingError):
    """Only one class present; a constant estimator is refused."""


class CostSpecError(PresmonError):
    """A declarative cost specification does not validate."""


class CostEvaluationError(PresmonError):
    """A cost function could not be evaluated on a concrete case."""


class ThresholdSearchError(PresmonError):
    """Threshold search preconditions are violated."""


class ConfigError(PresmonError):
    """An experiment configuration file is invalid."""
