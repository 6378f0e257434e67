"""
Evaluation metrics and the train/test split.

Thin wrappers around scikit-learn that pin the edge-case conventions:
zero-denominator scores are 0, tied AUC scores count one half, and points
in singleton clusters contribute 0 to the silhouette.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from sklearn import metrics as sk_metrics
from sklearn import model_selection

from .. import config as defaults
from ..errors import EmptyInput, LengthMismatch, SingleClass, TripleEntryError

logger = logging.getLogger(__name__)


class SingleCluster(TripleEntryError):
    """Raised when a silhouette is requested for fewer than two clusters."""

    pass


class FractionOutOfRange(TripleEntryError):
    """Raised when a test fraction is not strictly between 0 and 1."""

    pass


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
        }


def classification_metrics(y_true: Any, y_pred: Any) -> ClassificationMetrics:
    """
    Accuracy, precision, recall and F1 for binary labels (positive class 1).

    Raises:
        LengthMismatch: If the vectors differ in length.
        EmptyInput: If they are empty.
    """
    y_true = np.asarray(y_true).astype(int).ravel()
    y_pred = np.asarray(y_pred).astype(int).ravel()
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} labels vs {len(y_pred)} predictions")
    if len(y_true) == 0:
        raise EmptyInput("metrics need at least one prediction")
    kwargs = {"labels": [0, 1], "pos_label": 1, "average": "binary", "zero_division": 0}
    return ClassificationMetrics(
        accuracy=float(sk_metrics.accuracy_score(y_true, y_pred)),
        precision=float(sk_metrics.precision_score(y_true, y_pred, **kwargs)),
        recall=float(sk_metrics.recall_score(y_true, y_pred, **kwargs)),
        f1=float(sk_metrics.f1_score(y_true, y_pred, **kwargs)),
    )


def roc_auc(y_true: Any, scores: Any) -> float:
    """
    Rank-based area under the ROC curve.

    Raises:
        LengthMismatch: If the vectors differ in length.
        SingleClass: Unless both classes are present.
    """
    y_true = np.asarray(y_true).astype(int).ravel()
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if len(y_true) != len(scores):
        raise LengthMismatch(f"{len(y_true)} labels vs {len(scores)} scores")
    if len(np.unique(y_true)) < 2:
        raise SingleClass("ROC AUC needs both classes")
    return float(sk_metrics.roc_auc_score(y_true, scores))


def silhouette_score(X: Any, labels: Any) -> float:
    """
    Mean silhouette over all points, Euclidean distance.

    Noise labels (-1) are treated as an ordinary cluster.

    Raises:
        SingleCluster: If fewer than two clusters are present.
    """
    X = np.asarray(getattr(X, "values", X), dtype=np.float64)
    X = X.reshape(len(X), -1)
    labels = np.asarray(labels).ravel()
    n_clusters = len(np.unique(labels))
    if n_clusters < 2:
        raise SingleCluster(f"silhouette needs at least 2 clusters, got {n_clusters}")
    if n_clusters == len(labels):
        # every point is a singleton
        return 0.0
    return float(np.mean(sk_metrics.silhouette_samples(X, labels, metric="euclidean")))


def split_indices(
    n_rows: int, test_fraction: float = defaults.TEST_FRACTION, seed: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded shuffle of row positions cut into train and test parts.

    The test part has ceil(test_fraction * n_rows) rows.

    Raises:
        FractionOutOfRange: Unless 0 < test_fraction < 1.
    """
    if not 0 < test_fraction < 1:
        raise FractionOutOfRange(f"test_fraction must be in (0, 1), got {test_fraction}")
    if n_rows < 2:
        raise EmptyInput(f"cannot split {n_rows} rows")
    train, test = model_selection.train_test_split(
        np.arange(n_rows), test_size=test_fraction, random_state=seed, shuffle=True
    )
    return np.asarray(train), np.asarray(test)


def train_test_split(
    X: Any, y: Any, test_fraction: float = defaults.TEST_FRACTION, seed: int = 0
) -> Tuple[Tuple[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]:
    """
    Split X and y into ((X_train, y_train), (X_test, y_test)).

    Raises:
        FractionOutOfRange: Unless 0 < test_fraction < 1.
        LengthMismatch: If X and y differ in length.
    """
    X = np.asarray(getattr(X, "values", X))
    y = np.asarray(y)
    if len(X) != len(y):
        raise LengthMismatch(f"{len(X)} rows vs {len(y)} labels")
    train, test = split_indices(len(X), test_fraction, seed)
    logger.debug(f"Split {len(X)} rows into {len(train)} train / {len(test)} test")
    return (X[train], y[train]), (X[test], y[test])
