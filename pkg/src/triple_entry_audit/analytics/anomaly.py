"""
Anomaly detection: isolation forest and local outlier factor scoring.

Both detectors return an AnomalyReport whose flags mark the highest scoring
``contamination`` share of rows.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .. import config as defaults
from ..errors import KOutOfRange, TripleEntryError
from .classification import _as_matrix

logger = logging.getLogger(__name__)

LRD_FLOOR = 1e-12


class TooFewRows(TripleEntryError):
    """Raised when a detector receives fewer rows than it needs."""

    pass


@dataclass
class AnomalyReport:
    scores: np.ndarray
    flagged: np.ndarray
    method: str
    threshold: float
    contamination: float

    def top(self, n: int) -> List[int]:
        """Row positions of the n highest scores, highest first."""
        order = np.argsort(-self.scores, kind="stable")
        return [int(i) for i in order[:n]]

    def to_dict(self, row_keys: Optional[List[str]] = None) -> Dict[str, Any]:
        keys = row_keys or [str(i) for i in range(len(self.scores))]
        return {
            "contamination": self.contamination,
            "flagged": [keys[i] for i in np.flatnonzero(self.flagged)],
            "method": self.method,
            "scores": {key: float(score) for key, score in zip(keys, self.scores)},
            "threshold": float(self.threshold),
        }


def flag_scores(
    scores: np.ndarray, method: str, contamination: float = defaults.CONTAMINATION
) -> AnomalyReport:
    """
    Flag the top ``contamination`` fraction of scores.

    The number flagged is ceil(contamination * rows); the threshold is the
    lowest flagged score, and every row scoring at or above it is flagged.
    """
    if not 0 <= contamination < 1:
        raise TripleEntryError(f"contamination must be in [0, 1), got {contamination}")
    scores = np.asarray(scores, dtype=np.float64)
    n_flagged = math.ceil(contamination * len(scores) - 1e-9)
    if n_flagged == 0:
        return AnomalyReport(
            scores=scores,
            flagged=np.zeros(len(scores), dtype=bool),
            method=method,
            threshold=float("inf"),
            contamination=contamination,
        )
    threshold = float(np.sort(scores)[::-1][n_flagged - 1])
    return AnomalyReport(
        scores=scores,
        flagged=scores >= threshold,
        method=method,
        threshold=threshold,
        contamination=contamination,
    )


# ============================================================================
# ISOLATION FOREST
# ============================================================================


@lru_cache(maxsize=None)
def average_path_length(n: int) -> float:
    """Average unsuccessful-search path length in a BST of n nodes."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    harmonic = float(np.sum(1.0 / np.arange(1, n)))
    return 2.0 * harmonic - 2.0 * (n - 1) / n


@dataclass
class IsolationTree:
    """Array-backed isolation tree; feature -1 marks a leaf."""

    feature: List[int]
    threshold: List[float]
    left: List[int]
    right: List[int]
    size: List[int]
    depth: List[int]

    def path_length(self, x: np.ndarray) -> float:
        node = 0
        while self.feature[node] >= 0:
            node = self.left[node] if x[self.feature[node]] < self.threshold[node] else self.right[node]
        return self.depth[node] + average_path_length(self.size[node])

    def path_lengths(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(len(X))
        stack = [(0, np.arange(len(X)))]
        while stack:
            node, rows = stack.pop()
            if len(rows) == 0:
                continue
            if self.feature[node] < 0:
                out[rows] = self.depth[node] + average_path_length(self.size[node])
                continue
            go_left = X[rows, self.feature[node]] < self.threshold[node]
            stack.append((self.left[node], rows[go_left]))
            stack.append((self.right[node], rows[~go_left]))
        return out


def build_isolation_tree(X: np.ndarray, rng: np.random.Generator, height_limit: int) -> IsolationTree:
    """
    Grow one tree on a subsample.

    Each split picks a feature uniformly among those not constant in the
    node, then a threshold uniformly in that feature's range. Drawing from
    every column instead would let a constant feature produce an empty
    side; a node whose features are all constant becomes a leaf.
    """
    tree = IsolationTree([], [], [], [], [], [])

    def grow(rows: np.ndarray, depth: int) -> int:
        position = len(tree.feature)
        tree.feature.append(-1)
        tree.threshold.append(0.0)
        tree.left.append(-1)
        tree.right.append(-1)
        tree.size.append(len(rows))
        tree.depth.append(depth)
        if depth >= height_limit or len(rows) <= 1:
            return position

        block = X[rows]
        lo, hi = block.min(axis=0), block.max(axis=0)
        candidates = np.flatnonzero(hi > lo)
        if len(candidates) == 0:
            return position

        feature = int(rng.choice(candidates))
        threshold = float(lo[feature] + rng.random() * (hi[feature] - lo[feature]))
        go_left = block[:, feature] < threshold
        tree.feature[position] = feature
        tree.threshold[position] = threshold
        tree.left[position] = grow(rows[go_left], depth + 1)
        tree.right[position] = grow(rows[~go_left], depth + 1)
        return position

    grow(np.arange(len(X)), 0)
    return tree


def build_isolation_forest(
    X: Any,
    trees: int = defaults.IFOREST_TREES,
    subsample: Optional[int] = None,
    seed: int = 0,
) -> List[IsolationTree]:
    """
    Fit an isolation forest.

    Tree t draws its subsample and splits from a generator seeded with
    (seed, t), so each tree is reproducible on its own.

    Raises:
        TooFewRows: If fewer than two rows (or a subsample below two) are given.
    """
    X = _as_matrix(X)
    n = len(X)
    if n < 2:
        raise TooFewRows(f"isolation forest needs at least 2 rows, got {n}")
    size = min(subsample or defaults.IFOREST_MAX_SUBSAMPLE, n)
    if size < 2:
        raise TooFewRows(f"subsample must be at least 2, got {size}")
    if trees < 1:
        raise TripleEntryError(f"trees must be at least 1, got {trees}")

    height_limit = math.ceil(math.log2(size))
    forest = []
    for t in range(trees):
        rng = np.random.default_rng([seed, t])
        rows = rng.choice(n, size=size, replace=False)
        forest.append(build_isolation_tree(X[rows], rng, height_limit))
    return forest


def isolation_forest_scores(
    X: Any,
    trees: int = defaults.IFOREST_TREES,
    subsample: Optional[int] = None,
    seed: int = 0,
    contamination: float = defaults.CONTAMINATION,
) -> AnomalyReport:
    """
    Score rows by 2^(-E[path] / c(subsample)); scores lie in (0, 1).

    Args:
        X: Feature matrix.
        trees: Number of trees.
        subsample: Rows per tree; defaults to min(256, rows).
        seed: Forest seed.
        contamination: Fraction of rows flagged.

    Raises:
        TooFewRows: If fewer than two rows are given.
    """
    X = _as_matrix(X)
    forest = build_isolation_forest(X, trees, subsample, seed)
    size = min(subsample or defaults.IFOREST_MAX_SUBSAMPLE, len(X))
    mean_path = np.mean([tree.path_lengths(X) for tree in forest], axis=0)
    scores = np.power(2.0, -mean_path / average_path_length(size))
    logger.info(f"Isolation forest scored {len(X):,} rows with {trees} trees (subsample {size})")
    return flag_scores(scores, "isolation_forest", contamination)


# ============================================================================
# LOCAL OUTLIER FACTOR
# ============================================================================


def lof_scores(
    X: Any, k: int = defaults.LOF_K, contamination: float = defaults.CONTAMINATION
) -> AnomalyReport:
    """
    Local outlier factor of every row.

    The k-neighbourhood of a point holds every other point within its
    k-distance, so ties at that distance are all included. Local
    reachability density is floored at 1e-12 so duplicated points yield
    finite scores.

    Raises:
        KOutOfRange: If k < 1 or there are not at least k + 1 rows.
    """
    X = _as_matrix(X)
    n = len(X)
    if k < 1 or n < k + 1:
        raise KOutOfRange(f"LOF needs k >= 1 and at least k + 1 rows (k={k}, rows={n})")

    distances = cdist(X, X, metric="euclidean")
    np.fill_diagonal(distances, np.inf)
    k_distance = np.partition(distances, k - 1, axis=1)[:, k - 1]
    neighbours = distances <= k_distance[:, None]
    counts = neighbours.sum(axis=1)

    # reach-dist(p, o) = max(k-distance(o), d(p, o))
    reach = np.maximum(k_distance[None, :], distances)
    mean_reach = np.where(neighbours, reach, 0.0).sum(axis=1) / counts
    lrd = 1.0 / np.maximum(mean_reach, LRD_FLOOR)
    scores = np.where(neighbours, lrd[None, :], 0.0).sum(axis=1) / counts / lrd

    logger.info(f"LOF scored {n:,} rows with k={k}")
    return flag_scores(scores, "lof", contamination)
