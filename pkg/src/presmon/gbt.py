"""Gradient boosted regression trees for binary outcome likelihoods.

The ensemble minimizes the logistic loss L(y, F) = log(1 + exp(-(2y-1) F))
stagewise: each stage fits a histogram-based regression tree to the negative
gradients y - sigmoid(F) using variance-reduction splits, leaf values are
Newton steps (sum of residuals over sum of sigmoid'(F)), clipped to [-4, 4]
for stability. Predictions are sigmoid(F0 + lr * sum of tree outputs).

A small Newton-solved logistic regression is provided behind the same
interface as a fast baseline for tests and quick experiments.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import DegenerateLabelsError

_LEAF_CLIP = 4.0
_MIN_GAIN = 1e-12


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def logistic_loss(y: np.ndarray, score: np.ndarray) -> np.ndarray:
    """Per-sample logistic loss of raw scores against 0/1 labels."""
    margin = (2.0 * np.asarray(y, dtype=float) - 1.0) * np.asarray(score, dtype=float)
    return np.logaddexp(0.0, -margin)


def negative_gradient(y: np.ndarray, score: np.ndarray) -> np.ndarray:
    """Pseudo-residuals of the logistic loss: y - sigmoid(score)."""
    return np.asarray(y, dtype=float) - sigmoid(score)


def _bin_edges(X: np.ndarray, max_bins: int) -> list[np.ndarray]:
    """Per-feature cut points: value midpoints when few uniques, else quantiles."""
    edges = []
    for f in range(X.shape[1]):
        u = np.unique(X[:, f])
        if u.size <= 1:
            edges.append(np.empty(0))
        elif u.size <= max_bins:
            edges.append((u[:-1] + u[1:]) / 2.0)
        else:
            qs = np.quantile(X[:, f], np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            edges.append(np.unique(qs))
    return edges


def _apply_bins(X: np.ndarray, edges: list[np.ndarray]) -> np.ndarray:
    Xb = np.empty(X.shape, dtype=np.int32)
    for f, e in enumerate(edges):
        Xb[:, f] = np.searchsorted(e, X[:, f], side="left")
    return Xb


class _Tree:
    """Flat-array regression tree; leaves are marked by feature == -1."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if self.feature[node] < 0:
                out[idx] = self.value[node]
                continue
            go_left = X[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[go_left]))
            stack.append((self.right[node], idx[~go_left]))
        return out

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_Tree":
        tree = cls()
        tree.feature = [int(v) for v in d["feature"]]
        tree.threshold = [float(v) for v in d["threshold"]]
        tree.left = [int(v) for v in d["left"]]
        tree.right = [int(v) for v in d["right"]]
        tree.value = [float(v) for v in d["value"]]
        return tree


def _best_split(Xb, residual, idx, feature_order, edges, min_samples_leaf):
    """Scan histogram splits; returns (gain, feature, bin) or None.

    The gain is the sum-of-squares reduction of the residuals
    (sum_l^2/n_l + sum_r^2/n_r - sum^2/n), i.e. variance reduction times n.
    Ties resolve to the first feature and lowest bin for determinism.
    """
    n = idx.size
    total = residual[idx].sum()
    base = total * total / n
    best = None
    best_gain = _MIN_GAIN
    for f in feature_order:
        n_edges = edges[f].size
        if n_edges == 0:
            continue
        bins = Xb[idx, f]
        cnt = np.bincount(bins, minlength=n_edges + 1)
        sm = np.bincount(bins, weights=residual[idx], minlength=n_edges + 1)
        n_left = np.cumsum(cnt)[:-1]
        s_left = np.cumsum(sm)[:-1]
        n_right = n - n_left
        valid = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
        if not valid.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = s_left**2 / n_left + (total - s_left) ** 2 / n_right - base
        gains = np.where(valid, gains, -np.inf)
        b = int(np.argmax(gains))
        if gains[b] > best_gain:
            best_gain = gains[b]
            best = (f, b)
    if best is None:
        return None
    return best_gain, best[0], best[1]


def _grow_tree(Xb, edges, residual, hess, idx, max_depth, min_samples_leaf) -> _Tree:
    tree = _Tree()
    feature_order = range(Xb.shape[1])
    stack = [(tree.add_node(), idx, 0)]
    while stack:
        node, node_idx, depth = stack.pop()
        split = None
        if depth < max_depth and node_idx.size >= 2 * min_samples_leaf:
            split = _best_split(Xb, residual, node_idx, feature_order, edges, min_samples_leaf)
        if split is None:
            denom = hess[node_idx].sum() + 1e-12
            tree.value[node] = float(np.clip(residual[node_idx].sum() / denom, -_LEAF_CLIP, _LEAF_CLIP))
            continue
        _, f, b = split
        tree.feature[node] = f
        tree.threshold[node] = float(edges[f][b])
        go_left = Xb[node_idx, f] <= b
        left, right = tree.add_node(), tree.add_node()
        tree.left[node], tree.right[node] = left, right
        stack.append((left, node_idx[go_left], depth + 1))
        stack.append((right, node_idx[~go_left], depth + 1))
    return tree


class GradientBoostedTreesClassifier(BaseEstimator, ClassifierMixin):
    """Binary classifier built from scratch on histogram regression trees.

    Parameters follow the usual boosting vocabulary; ``subsample`` < 1 fits
    each tree on a seeded random row fraction (stochastic boosting). The
    fitted model records the training loss after every stage in
    ``train_loss_path_``.
    """

    def __init__(
        self,
        n_trees: int = 100,
        learning_rate: float = 0.1,
        max_depth: int = 4,
        min_samples_leaf: int = 10,
        subsample: float = 1.0,
        rng_seed: int = 0,
        max_bins: int = 64,
    ):
        self.n_trees = n_trees
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.subsample = subsample
        self.rng_seed = rng_seed
        self.max_bins = max_bins

    def _validate_params_strict(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ValueError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if not 0 < self.subsample <= 1:
            raise ValueError(f"subsample must be in (0, 1], got {self.subsample}")
        if self.max_bins < 2:
            raise ValueError(f"max_bins must be >= 2, got {self.max_bins}")

    def fit(self, X, y) -> "GradientBoostedTreesClassifier":
        self._validate_params_strict()
        X, y = check_X_y(X, y)
        y = np.asarray(y, dtype=float)
        classes = np.unique(y)
        if classes.size < 2:
            raise DegenerateLabelsError(
                "training labels contain a single class; refusing to fit a constant estimator"
            )
        if not np.isin(classes, (0.0, 1.0)).all():
            raise ValueError(f"labels must be binary 0/1, got classes {classes}")

        n = X.shape[0]
        prevalence = y.mean()
        self.init_score_ = float(np.log(prevalence / (1.0 - prevalence)))
        edges = _bin_edges(X, self.max_bins)
        Xb = _apply_bins(X, edges)

        rng = np.random.default_rng(self.rng_seed)
        scores = np.full(n, self.init_score_)
        self.trees_: list[_Tree] = []
        self.train_loss_path_: list[float] = []
        n_sub = max(2 * self.min_samples_leaf, int(round(self.subsample * n)))
        n_sub = min(n_sub, n)
        for _ in range(self.n_trees):
            p = sigmoid(scores)
            residual = y - p
            hess = p * (1.0 - p)
            if n_sub < n:
                idx = np.sort(rng.choice(n, size=n_sub, replace=False))
            else:
                idx = np.arange(n)
            tree = _grow_tree(Xb, edges, residual, hess, idx,
                              self.max_depth, self.min_samples_leaf)
            scores += self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
            self.train_loss_path_.append(float(logistic_loss(y, scores).mean()))

        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "trees_")
        X = check_array(X)
        scores = np.full(X.shape[0], self.init_score_)
        for tree in self.trees_:
            scores += self.learning_rate * tree.predict(X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(int)

    def to_dict(self) -> dict:
        check_is_fitted(self, "trees_")
        return {
            "kind": "gbt",
            "params": self.get_params(),
            "init_score": self.init_score_,
            "n_features_in": int(self.n_features_in_),
            "trees": [t.to_dict() for t in self.trees_],
            "train_loss_path": self.train_loss_path_,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradientBoostedTreesClassifier":
        model = cls(**d["params"])
        model.init_score_ = float(d["init_score"])
        model.n_features_in_ = int(d["n_features_in"])
        model.trees_ = [_Tree.from_dict(t) for t in d["trees"]]
        model.train_loss_path_ = [float(v) for v in d["train_loss_path"]]
        model.classes_ = np.array([0, 1])
        return model


class LogisticRegressionClassifier(BaseEstimator, ClassifierMixin):
    """Ridge-regularized logistic regression solved by Newton iterations.

    Kept deliberately small; it exists as a cheap stand-in for the boosted
    trees behind the same predict_proba interface.
    """

    def __init__(self, l2: float = 1e-3, max_iter: int = 50, tol: float = 1e-8):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y) -> "LogisticRegressionClassifier":
        X, y = check_X_y(X, y)
        y = np.asarray(y, dtype=float)
        if np.unique(y).size < 2:
            raise DegenerateLabelsError(
                "training labels contain a single class; refusing to fit a constant estimator"
            )
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        Z = np.column_stack([np.ones(X.shape[0]), (X - self.mean_) / self.scale_])
        w = np.zeros(Z.shape[1])
        n = Z.shape[0]
        for _ in range(self.max_iter):
            p = sigmoid(Z @ w)
            grad = Z.T @ (p - y) / n + self.l2 * w
            if np.linalg.norm(grad) < self.tol:
                break
            h = p * (1.0 - p)
            hessian = (Z.T * h) @ Z / n + self.l2 * np.eye(Z.shape[1])
            w = w - np.linalg.solve(hessian, grad)
        self.coef_ = w
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_array(X)
        Z = np.column_stack([np.ones(X.shape[0]), (X - self.mean_) / self.scale_])
        return Z @ self.coef_

    def predict_proba(self, X) -> np.ndarray:
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(int)

    def to_dict(self) -> dict:
        check_is_fitted(self, "coef_")
        return {
            "kind": "logreg",
            "params": self.get_params(),
            "coef": self.coef_.tolist(),
            "mean": self.mean_.tolist(),
            "scale": self.scale_.tolist(),
            "n_features_in": int(self.n_features_in_),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticRegressionClassifier":
        model = cls(**d["params"])
        model.coef_ = np.asarray(d["coef"])
        model.mean_ = np.asarray(d["mean"])
        model.scale_ = np.asarray(d["scale"])
        model.n_features_in_ = int(d["n_features_in"])
        model.classes_ = np.array([0, 1])
        return model
