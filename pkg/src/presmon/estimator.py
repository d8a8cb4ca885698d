"""Outcome likelihood estimation on trace prefixes.

One single classifier is trained on every decision prefix (lengths 1..len-1)
of the training log; the label of each row is the case outcome. Hyperparameter
search scores candidates by mean ROC-AUC over a 3-fold cross-validation that
splits by case, never by row.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.metrics import roc_auc_score

from .encoding import EncodingSchema, PrefixEncoder
from .eventlog.model import EventLog, Prefix, Trace, decision_prefixes
from .exceptions import TrainingError
from .gbt import GradientBoostedTreesClassifier, LogisticRegressionClassifier

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Hyperparams:
    n_trees: int = 100
    learning_rate: float = 0.1
    max_depth: int = 4
    min_samples_leaf: int = 10
    subsample: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ValueError(f"hyperparameters must be positive: {self}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError(f"learning_rate must be in (0, 1]: {self.learning_rate}")
        if not 0 < self.subsample <= 1:
            raise ValueError(f"subsample must be in (0, 1]: {self.subsample}")

    def to_dict(self) -> dict:
        return asdict(self)


# Random-search grid; the first candidate drawn is always the default setting.
HYPERPARAM_GRID: dict[str, tuple] = {
    "n_trees": (50, 100, 200),
    "learning_rate": (0.05, 0.1, 0.2),
    "max_depth": (3, 4, 5, 6),
    "min_samples_leaf": (5, 10, 20),
    "subsample": (0.7, 0.85, 1.0),
}


def _training_rows(train_log: EventLog, encoder: PrefixEncoder):
    prefixes: list[Prefix] = []
    case_ids: list[str] = []
    for trace in train_log:
        for p in decision_prefixes(trace):
            prefixes.append(p)
            case_ids.append(trace.case_id)
    if not prefixes:
        raise TrainingError("no decision prefixes: every trace has length 1")
    X = encoder.transform(prefixes)
    y = np.array([p.trace.outcome for p in prefixes], dtype=int)
    return X, y, np.array(case_ids)


def make_training_set(train_log: EventLog, encoder: PrefixEncoder):
    """Encode all decision prefixes of a log; returns (features, labels)."""
    X, y, _ = _training_rows(train_log, encoder)
    return X, y


def _new_classifier(kind: str, hp: Hyperparams):
    if kind == "gbt":
        return GradientBoostedTreesClassifier(**hp.to_dict())
    if kind == "logreg":
        return LogisticRegressionClassifier()
    raise ValueError(f"unknown classifier kind {kind!r}")


def case_folds(case_ids: np.ndarray, n_folds: int, seed: int) -> np.ndarray:
    """Assign a fold number to every row so that all rows of a case share one fold."""
    unique = np.unique(case_ids)
    rng = np.random.default_rng(seed)
    shuffled = unique[rng.permutation(unique.size)]
    fold_of_case = {cid: i % n_folds for i, cid in enumerate(shuffled)}
    return np.array([fold_of_case[c] for c in case_ids])


def _cv_auc(X, y, folds, hp: Hyperparams, kind: str, n_folds: int) -> float:
    scores = []
    for fold in range(n_folds):
        held = folds == fold
        if held.all() or not held.any():
            continue
        y_train = y[~held]
        if np.unique(y_train).size < 2 or np.unique(y[held]).size < 2:
            continue
        clf = _new_classifier(kind, hp).fit(X[~held], y_train)
        scores.append(roc_auc_score(y[held], clf.predict_proba(X[held])[:, 1]))
    if not scores:
        return 0.5
    return float(np.mean(scores))


def _draw_candidates(budget: int, seed: int) -> list[Hyperparams]:
    candidates = [Hyperparams()]
    rng = np.random.default_rng(seed)
    seen = {candidates[0]}
    attempts = 0
    while len(candidates) < budget and attempts < budget * 20:
        attempts += 1
        hp = Hyperparams(**{name: values[rng.integers(len(values))]
                            for name, values in HYPERPARAM_GRID.items()})
        if hp not in seen:
            seen.add(hp)
            candidates.append(hp)
    return candidates


def tune_hyperparams(
    train_log: EventLog,
    encoder: PrefixEncoder,
    search_budget: int,
    seed: int = 0,
    kind: str = "gbt",
    candidates: Sequence[Hyperparams] | None = None,
    n_folds: int = 3,
) -> Hyperparams:
    """Pick the candidate with the best mean case-level CV AUC.

    ``search_budget`` counts evaluated candidates; a budget of 1 returns the
    default setting without running the cross-validation.
    """
    if search_budget < 1:
        raise ValueError(f"search budget must be >= 1, got {search_budget}")
    if candidates is None:
        candidates = _draw_candidates(search_budget, seed)
    else:
        candidates = list(candidates)[:search_budget]
    if len(candidates) == 1:
        return candidates[0]
    X, y, case_ids = _training_rows(train_log, encoder)
    folds = case_folds(case_ids, n_folds, seed)
    scored = [(_cv_auc(X, y, folds, hp, kind, n_folds), i, hp) for i, hp in enumerate(candidates)]
    best = max(scored, key=lambda t: (t[0], -t[1]))  # ties keep the earlier candidate
    return best[2]


class OutcomeEstimator:
    """A fitted classifier plus its encoding schema; maps prefixes to likelihoods."""

    def __init__(self, classifier, encoder: PrefixEncoder, metadata: dict | None = None):
        self.classifier = classifier
        self.encoder = encoder
        self.metadata = dict(metadata or {})

    @classmethod
    def train(
        cls,
        train_log: EventLog,
        hp: Hyperparams | None = None,
        kind: str = "gbt",
        encoder: PrefixEncoder | None = None,
        metadata: dict | None = None,
    ) -> "OutcomeEstimator":
        hp = hp or Hyperparams()
        if encoder is None:
            encoder = PrefixEncoder().fit(train_log)
        X, y, _ = _training_rows(train_log, encoder)
        clf = _new_classifier(kind, hp).fit(X, y)
        meta = {"kind": kind, "hyperparams": hp.to_dict(), "n_training_rows": int(X.shape[0])}
        meta.update(metadata or {})
        return cls(clf, encoder, meta)

    def predict(self, p: Prefix) -> float:
        return float(self.classifier.predict_proba(self.encoder.transform([p]))[:, 1][0])

    def predict_many(self, prefixes: Sequence[Prefix]) -> np.ndarray:
        if len(prefixes) == 0:
            return np.empty(0)
        return self.classifier.predict_proba(self.encoder.transform(prefixes))[:, 1]

    def prefix_scores(self, trace: Trace) -> np.ndarray:
        """Likelihoods at every decision point of one trace (lengths 1..len-1)."""
        return self.predict_many(decision_prefixes(trace))

    def score_log(self, log: EventLog) -> dict[str, np.ndarray]:
        """Batch-score all decision prefixes of a log; one pass over the model."""
        prefixes: list[Prefix] = []
        counts: list[tuple[str, int]] = []
        for trace in log:
            ps = decision_prefixes(trace)
            prefixes.extend(ps)
            counts.append((trace.case_id, len(ps)))
        flat = self.predict_many(prefixes)
        out: dict[str, np.ndarray] = {}
        pos = 0
        for case_id, n in counts:
            out[case_id] = flat[pos:pos + n]
            pos += n
        return out

    @property
    def schema(self) -> EncodingSchema:
        return self.encoder.schema_

    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "model": self.classifier.to_dict(),
            "schema": self.encoder.schema_.to_dict(),
            "metadata": self.metadata,
        }
        Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "OutcomeEstimator":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        version = payload.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version!r}")
        kind = payload["model"]["kind"]
        if kind == "gbt":
            clf = GradientBoostedTreesClassifier.from_dict(payload["model"])
        elif kind == "logreg":
            clf = LogisticRegressionClassifier.from_dict(payload["model"])
        else:
            raise ValueError(f"unknown model kind {kind!r}")
        encoder = PrefixEncoder.from_schema(EncodingSchema.from_dict(payload["schema"]))
        return cls(clf, encoder, payload.get("metadata", {}))
