"""
Classifiers: L2-regularized logistic regression and a Gini decision tree.

Both are written directly on numpy so every step is deterministic given the
seed, and both serialize to plain dicts for reuse by the CLI.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .. import config as defaults
from ..errors import SingleClass, TripleEntryError

logger = logging.getLogger(__name__)


class NonFiniteFeature(TripleEntryError):
    """Raised when a training matrix contains NaN or infinite values."""

    pass


class ModelInvalid(TripleEntryError):
    """Raised when a serialized model cannot be rebuilt."""

    pass


def _as_matrix(X: Any) -> np.ndarray:
    values = getattr(X, "values", X)
    values = np.asarray(values, dtype=np.float64)
    return values.reshape(len(values), -1)


# ============================================================================
# LOGISTIC REGRESSION
# ============================================================================


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = defaults.LOGISTIC_LEARNING_RATE
    max_iter: int = defaults.LOGISTIC_MAX_ITER
    l2: float = defaults.LOGISTIC_L2
    seed: int = 0
    tol: float = defaults.LOGISTIC_GRAD_TOL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "l2": self.l2,
            "learning_rate": self.learning_rate,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "tol": self.tol,
        }


@dataclass
class LogisticModel:
    weights: np.ndarray
    config: LogisticConfig
    loss_history: List[float] = field(default_factory=list)
    n_iter: int = 0

    def feature_weights(self) -> np.ndarray:
        return self.weights[1:]


def sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(z, dtype=np.float64)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    exp_z = np.exp(z[~positive])
    out[~positive] = exp_z / (1.0 + exp_z)
    return out


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((X.shape[0], 1)), X])


def logistic_loss(weights: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean log loss plus (l2 / 2)·||w||² over the non-bias weights."""
    z = _augment(X) @ weights
    # log(1 + e^z) - y·z, computed stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    return float(loss + 0.5 * l2 * np.sum(weights[1:] ** 2))


def logistic_gradient(weights: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> np.ndarray:
    """Analytic gradient of logistic_loss."""
    A = _augment(X)
    grad = A.T @ (sigmoid(A @ weights) - y) / len(y)
    grad[1:] += l2 * weights[1:]
    return grad


def train_logistic(X: Any, y: Any, config: Optional[LogisticConfig] = None) -> LogisticModel:
    """
    Fit logistic regression by batch gradient descent.

    Weights start from a small seeded perturbation around zero. Training
    stops after ``max_iter`` steps or once the gradient's max-norm falls
    below ``tol``.

    Raises:
        SingleClass: If y does not contain both 0 and 1.
        NonFiniteFeature: If X holds NaN or infinite values.
    """
    config = config or LogisticConfig()
    X = _as_matrix(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(y) < 2 or len(np.unique(y)) < 2:
        raise SingleClass("logistic regression needs both classes")
    if not np.isfinite(X).all():
        raise NonFiniteFeature("training matrix contains NaN or infinite values")

    rng = np.random.default_rng(config.seed)
    weights = rng.normal(0.0, 1e-3, size=X.shape[1] + 1)
    history = [logistic_loss(weights, X, y, config.l2)]

    n_iter = 0
    while n_iter < config.max_iter:
        grad = logistic_gradient(weights, X, y, config.l2)
        if np.max(np.abs(grad)) < config.tol:
            break
        weights = weights - config.learning_rate * grad
        n_iter += 1
        history.append(logistic_loss(weights, X, y, config.l2))

    logger.info(f"Logistic regression trained: {n_iter} iterations, loss {history[-1]:.6f}")
    return LogisticModel(weights=weights, config=config, loss_history=history, n_iter=n_iter)


def predict_logistic_proba(model: LogisticModel, X: Any) -> np.ndarray:
    X = _as_matrix(X)
    return sigmoid(_augment(X) @ model.weights)


def predict_logistic(model: LogisticModel, X: Any) -> np.ndarray:
    """Class 1 where the probability is at least 0.5."""
    return (predict_logistic_proba(model, X) >= 0.5).astype(int)


def logistic_trainer(config: Optional[LogisticConfig] = None):
    """Trainer handle for recursive_feature_elimination."""
    base = config or LogisticConfig()

    def train(X: np.ndarray, y: np.ndarray, seed: int) -> LogisticModel:
        return train_logistic(
            X,
            y,
            LogisticConfig(base.learning_rate, base.max_iter, base.l2, seed, base.tol),
        )

    return train


# ============================================================================
# DECISION TREE
# ============================================================================


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = defaults.TREE_MAX_DEPTH
    min_samples_split: int = defaults.TREE_MIN_SAMPLES_SPLIT

    def to_dict(self) -> Dict[str, Any]:
        return {"max_depth": self.max_depth, "min_samples_split": self.min_samples_split}


@dataclass
class TreeNode:
    """Internal node (feature, threshold, children) or leaf (label, probability)."""

    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional[int] = None
    right: Optional[int] = None
    label: Optional[int] = None
    probability: Optional[float] = None
    class_counts: Dict[int, int] = field(default_factory=dict)
    impurity: float = 0.0
    samples: int = 0
    depth: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class_counts": {str(k): v for k, v in sorted(self.class_counts.items())},
            "depth": self.depth,
            "feature": self.feature,
            "impurity": self.impurity,
            "label": self.label,
            "left": self.left,
            "probability": self.probability,
            "right": self.right,
            "samples": self.samples,
            "threshold": self.threshold,
        }


@dataclass
class DecisionTree:
    nodes: List[TreeNode]
    config: TreeConfig
    n_features: int
    classes: List[int]

    def feature_weights(self) -> np.ndarray:
        """Total weighted Gini decrease contributed by each feature."""
        importance = np.zeros(self.n_features)
        for node in self.nodes:
            if node.is_leaf:
                continue
            left, right = self.nodes[node.left], self.nodes[node.right]
            importance[node.feature] += (
                node.samples * node.impurity
                - left.samples * left.impurity
                - right.samples * right.impurity
            )
        return importance

    @property
    def depth(self) -> int:
        return max(node.depth for node in self.nodes)

    def leaf_for(self, x: np.ndarray) -> TreeNode:
        node = self.nodes[0]
        while not node.is_leaf:
            node = self.nodes[node.left if x[node.feature] <= node.threshold else node.right]
        return node


def gini(labels: np.ndarray) -> float:
    if len(labels) == 0:
        return 0.0
    _, counts = np.unique(labels, return_counts=True)
    p = counts / len(labels)
    return float(1.0 - np.sum(p**2))


def _best_split(X: np.ndarray, y: np.ndarray) -> Optional[Tuple[int, float]]:
    """
    Lowest weighted child impurity over all features and midpoints.

    Scanning features and thresholds in ascending order and keeping only a
    strictly better candidate resolves ties to the lowest feature index and
    then the lowest threshold.
    """
    best: Optional[Tuple[int, float]] = None
    best_score = np.inf
    n = len(y)
    classes = np.unique(y)
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs, ys = X[order, j], y[order]
        onehot = (ys[:, None] == classes[None, :]).astype(np.float64)
        left_counts = np.cumsum(onehot, axis=0)[:-1]
        total = onehot.sum(axis=0)
        right_counts = total - left_counts
        n_left = np.arange(1, n)
        n_right = n - n_left
        gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
        weighted = (n_left * gini_left + n_right * gini_right) / n

        distinct = xs[1:] != xs[:-1]
        for i in np.flatnonzero(distinct):
            if weighted[i] < best_score - 1e-12:
                best_score = weighted[i]
                best = (j, float((xs[i] + xs[i + 1]) / 2.0))
    return best


def train_decision_tree(X: Any, y: Any, config: Optional[TreeConfig] = None) -> DecisionTree:
    """
    Grow a classification tree greedily on Gini impurity.

    A node becomes a leaf when it is pure, at max_depth, smaller than
    min_samples_split, or has no feature with two distinct values. Other
    nodes always split on the best available threshold, even one that does
    not lower impurity, so XOR-like data can still be separated one level
    down.
    """
    config = config or TreeConfig()
    X = _as_matrix(X)
    y = np.asarray(y).astype(int).ravel()
    if len(y) == 0:
        raise SingleClass("decision tree needs at least one row")
    classes = sorted(int(c) for c in np.unique(y))
    nodes: List[TreeNode] = []

    def grow(indices: np.ndarray, depth: int) -> int:
        labels = y[indices]
        values, counts = np.unique(labels, return_counts=True)
        class_counts = {int(v): int(c) for v, c in zip(values, counts)}
        # majority, ties to the lowest label
        label = max(class_counts, key=lambda c: (class_counts[c], -c))
        node = TreeNode(
            label=label,
            probability=class_counts[label] / len(indices),
            class_counts=class_counts,
            impurity=gini(labels),
            samples=len(indices),
            depth=depth,
        )
        position = len(nodes)
        nodes.append(node)

        if (
            node.impurity == 0.0
            or depth >= config.max_depth
            or len(indices) < config.min_samples_split
        ):
            return position
        split = _best_split(X[indices], labels)
        if split is None:
            return position

        feature, threshold = split
        go_left = X[indices, feature] <= threshold
        node.feature = feature
        node.threshold = threshold
        node.label = None
        node.probability = None
        node.left = grow(indices[go_left], depth + 1)
        node.right = grow(indices[~go_left], depth + 1)
        return position

    grow(np.arange(len(y)), 0)
    tree = DecisionTree(nodes=nodes, config=config, n_features=X.shape[1], classes=classes)
    logger.info(f"Decision tree trained: {len(nodes)} nodes, depth {tree.depth}")
    return tree


def predict_tree_proba(tree: DecisionTree, X: Any) -> np.ndarray:
    """Probability of class 1 per row (leaf share of class 1)."""
    X = _as_matrix(X)
    out = np.empty(len(X))
    for i, x in enumerate(X):
        leaf = tree.leaf_for(x)
        out[i] = leaf.class_counts.get(1, 0) / leaf.samples
    return out


def predict_tree(tree: DecisionTree, X: Any) -> np.ndarray:
    X = _as_matrix(X)
    return np.array([tree.leaf_for(x).label for x in X], dtype=int)


def tree_trainer(config: Optional[TreeConfig] = None):
    """Trainer handle for recursive_feature_elimination; the seed is unused."""

    def train(X: np.ndarray, y: np.ndarray, seed: int) -> DecisionTree:
        return train_decision_tree(X, y, config)

    return train


# ============================================================================
# SERIALIZATION
# ============================================================================


def model_to_dict(model: Union[LogisticModel, DecisionTree]) -> Dict[str, Any]:
    if isinstance(model, LogisticModel):
        return {
            "config": model.config.to_dict(),
            "model_type": "logistic",
            "n_iter": model.n_iter,
            "weights": [float(w) for w in model.weights],
        }
    return {
        "classes": list(model.classes),
        "config": model.config.to_dict(),
        "model_type": "tree",
        "n_features": model.n_features,
        "nodes": [node.to_dict() for node in model.nodes],
    }


def model_from_dict(data: Dict[str, Any]) -> Union[LogisticModel, DecisionTree]:
    """
    Rebuild a model written by model_to_dict.

    Raises:
        ModelInvalid: On an unknown model type or missing fields.
    """
    try:
        kind = data["model_type"]
        if kind == "logistic":
            return LogisticModel(
                weights=np.asarray(data["weights"], dtype=np.float64),
                config=LogisticConfig(**data["config"]),
                n_iter=int(data.get("n_iter", 0)),
            )
        if kind == "tree":
            nodes = []
            for raw in data["nodes"]:
                raw = dict(raw)
                raw["class_counts"] = {int(k): v for k, v in raw["class_counts"].items()}
                nodes.append(TreeNode(**raw))
            return DecisionTree(
                nodes=nodes,
                config=TreeConfig(**data["config"]),
                n_features=int(data["n_features"]),
                classes=list(data["classes"]),
            )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelInvalid(f"invalid model document: {e}") from e
    raise ModelInvalid(f"unknown model type {data.get('model_type')!r}")
