"""
Clustering: seeded k-means (Lloyd) and DBSCAN.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from sklearn.cluster import DBSCAN

from .. import config as defaults
from ..errors import KOutOfRange, TripleEntryError
from .classification import _as_matrix

logger = logging.getLogger(__name__)

# relative slack before a rising inertia counts as an error
INERTIA_TOLERANCE = 1e-9


class InertiaIncreased(TripleEntryError):
    """Raised when a Lloyd iteration increases the clustering inertia."""

    pass


@dataclass
class ClusterAssignment:
    """Cluster label per row; -1 marks DBSCAN noise."""

    labels: np.ndarray
    inertia: float
    method: str
    centroids: Optional[np.ndarray] = None
    inertia_history: List[float] = field(default_factory=list)
    n_iter: int = 0

    @property
    def n_clusters(self) -> int:
        return len({int(label) for label in self.labels if label >= 0})

    def to_dict(self) -> Dict[str, Any]:
        labels = [int(label) for label in self.labels]
        sizes: Dict[str, int] = {}
        for label in labels:
            sizes[str(label)] = sizes.get(str(label), 0) + 1
        return {
            "centroids": None if self.centroids is None else self.centroids.tolist(),
            "cluster_sizes": dict(sorted(sizes.items(), key=lambda kv: int(kv[0]))),
            "inertia": float(self.inertia),
            "labels": labels,
            "method": self.method,
            "n_clusters": self.n_clusters,
            "n_iter": self.n_iter,
        }


def _squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _inertia(X: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(((X - centroids[labels]) ** 2).sum())


def kmeans(
    X: Any,
    k: int = defaults.KMEANS_K,
    seed: int = 0,
    max_iter: int = defaults.KMEANS_MAX_ITER,
) -> ClusterAssignment:
    """
    Lloyd's k-means with seeded initialization.

    The k initial centroids are k distinct rows sampled with the seed.
    Assignment ties go to the lowest centroid index. A centroid left with no
    members is moved onto the point farthest from its current centroid.
    Iteration stops when labels no longer change or after ``max_iter``
    updates.

    Raises:
        KOutOfRange: If k is not in [1, rows].
        InertiaIncreased: If an iteration raises the inertia.
    """
    X = _as_matrix(X)
    n = len(X)
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")

    rng = np.random.default_rng(seed)
    centroids = X[rng.choice(n, size=k, replace=False)].copy()
    labels = np.argmin(_squared_distances(X, centroids), axis=1)
    history = [_inertia(X, labels, centroids)]

    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        distances = ((X - centroids[labels]) ** 2).sum(axis=1)
        for j in range(k):
            members = labels == j
            if members.any():
                centroids[j] = X[members].mean(axis=0)
            else:
                farthest = int(np.argmax(distances))
                logger.debug(f"Reseeding empty cluster {j} at row {farthest}")
                centroids[j] = X[farthest]
                distances[farthest] = -1.0

        new_labels = np.argmin(_squared_distances(X, centroids), axis=1)
        inertia = _inertia(X, new_labels, centroids)
        if inertia > history[-1] + INERTIA_TOLERANCE * max(1.0, history[-1]):
            raise InertiaIncreased(
                f"inertia rose from {history[-1]} to {inertia} at iteration {n_iter}"
            )
        history.append(inertia)
        converged = np.array_equal(new_labels, labels)
        labels = new_labels
        if converged:
            break

    logger.info(f"k-means (k={k}) finished after {n_iter} iterations, inertia {history[-1]:.6g}")
    return ClusterAssignment(
        labels=labels.astype(int),
        inertia=history[-1],
        method="kmeans",
        centroids=centroids,
        inertia_history=history,
        n_iter=n_iter,
    )


def dbscan(
    X: Any, eps: float = defaults.DBSCAN_EPS, min_pts: int = defaults.DBSCAN_MIN_PTS
) -> ClusterAssignment:
    """
    Density clustering with Euclidean distance.

    A point is core when at least ``min_pts`` points (itself included) lie
    within ``eps``. Clusters are grown in row order, so a border point joins
    the first cluster that reaches it. Inertia is the squared distance of
    clustered points to their cluster mean; noise is excluded.

    Raises:
        TripleEntryError: If eps <= 0 or min_pts < 1.
    """
    if eps <= 0:
        raise TripleEntryError(f"eps must be positive, got {eps}")
    if min_pts < 1:
        raise TripleEntryError(f"min_pts must be at least 1, got {min_pts}")
    X = _as_matrix(X)
    if len(X) == 0:
        return ClusterAssignment(labels=np.zeros(0, dtype=int), inertia=0.0, method="dbscan")

    labels = DBSCAN(eps=eps, min_samples=min_pts, metric="euclidean").fit_predict(X)
    inertia = 0.0
    for label in np.unique(labels[labels >= 0]):
        members = X[labels == label]
        inertia += float(((members - members.mean(axis=0)) ** 2).sum())

    assignment = ClusterAssignment(labels=labels.astype(int), inertia=inertia, method="dbscan")
    noise = int((labels == -1).sum())
    logger.info(f"DBSCAN found {assignment.n_clusters} clusters and {noise} noise points")
    return assignment
