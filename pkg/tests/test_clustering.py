"""
Tests for k-means and DBSCAN clustering.
"""

import numpy as np
import pytest

from triple_entry_audit.analytics import dbscan, kmeans
from triple_entry_audit.analytics.clustering import INERTIA_TOLERANCE
from triple_entry_audit.errors import KOutOfRange, TripleEntryError


class TestKMeans:
    """Test suite for seeded Lloyd's k-means."""

    @pytest.fixture
    def points(self):
        return np.random.default_rng(8).normal(size=(40, 3))

    def test_single_cluster_is_mean(self, points):
        """Test that k=1 puts the centroid at the column means."""
        result = kmeans(points, k=1, seed=0)
        assert set(result.labels.tolist()) == {0}
        np.testing.assert_allclose(result.centroids[0], points.mean(axis=0))

    def test_one_cluster_per_point(self, points):
        """Test that k=n leaves zero inertia."""
        result = kmeans(points, k=len(points), seed=3)
        assert result.inertia == pytest.approx(0.0, abs=1e-12)
        assert len(set(result.labels.tolist())) == len(points)

    def test_separated_blobs(self):
        """Test that two distant pairs land in two clusters."""
        X = np.array([[0.0], [0.1], [10.0], [10.1]])
        for seed in range(5):
            labels = kmeans(X, k=2, seed=seed).labels
            assert labels[0] == labels[1]
            assert labels[2] == labels[3]
            assert labels[0] != labels[2]

    def test_matches_best_two_partition(self):
        """Test well-separated data against exhaustive search over 2-partitions."""
        rng = np.random.default_rng(5)
        for seed in range(10):
            X = np.concatenate([rng.normal(0, 0.2, size=(4, 1)), rng.normal(10, 0.2, size=(4, 1))])
            best = np.inf
            for mask in range(1, 2 ** len(X) - 1):
                member = np.array([(mask >> i) & 1 for i in range(len(X))], dtype=bool)
                sse = sum(((part - part.mean(axis=0)) ** 2).sum() for part in (X[member], X[~member]))
                best = min(best, sse)
            assert kmeans(X, k=2, seed=seed).inertia == pytest.approx(best)

    def test_inertia_never_increases(self):
        """Test the monotone inertia history across many seeded runs."""
        rng = np.random.default_rng(21)
        for run in range(100):
            X = rng.normal(size=(int(rng.integers(10, 60)), 2))
            k = int(rng.integers(1, 6))
            history = np.array(kmeans(X, k=k, seed=run).inertia_history)
            slack = INERTIA_TOLERANCE * np.maximum(1.0, history[:-1])
            assert np.all(np.diff(history) <= slack)

    def test_deterministic_given_seed(self, points):
        """Test identical labels for identical seeds."""
        a = kmeans(points, k=4, seed=12)
        b = kmeans(points, k=4, seed=12)
        assert a.labels.tolist() == b.labels.tolist()
        assert a.inertia == b.inertia

    def test_k_out_of_range(self, points):
        """Test that k outside [1, rows] is refused."""
        with pytest.raises(KOutOfRange):
            kmeans(points, k=0, seed=0)
        with pytest.raises(KOutOfRange):
            kmeans(points, k=len(points) + 1, seed=0)

    def test_to_dict(self):
        """Test the JSON-friendly summary."""
        X = np.array([[0.0], [0.1], [10.0], [10.1]])
        summary = kmeans(X, k=2, seed=0).to_dict()
        assert summary["method"] == "kmeans"
        assert summary["n_clusters"] == 2
        assert sorted(summary["cluster_sizes"].values()) == [2, 2]


class TestDBSCAN:
    """Test suite for density clustering."""

    def test_chain_and_noise(self):
        """Test that a chain of close points clusters and a far point is noise."""
        X = np.array([[0.0], [1.0], [2.0], [10.0]])
        result = dbscan(X, eps=1.5, min_pts=2)
        assert result.labels.tolist() == [0, 0, 0, -1]
        assert result.n_clusters == 1
        # noise excluded: squared distances to the mean 1.0
        assert result.inertia == pytest.approx(2.0)

    def test_two_clusters(self):
        """Test that separated groups get separate labels."""
        X = np.array([[0.0, 0.0], [0.0, 0.5], [5.0, 5.0], [5.0, 5.5]])
        result = dbscan(X, eps=1.0, min_pts=2)
        assert result.labels.tolist() == [0, 0, 1, 1]

    def test_row_order_does_not_change_clusters(self):
        """Test noise and core-point clusters under row permutation, up to relabelling."""
        rng = np.random.default_rng(9)
        for trial in range(30):
            centers = rng.uniform(-10, 10, size=(3, 2))
            X = np.concatenate(
                [c + rng.normal(scale=0.6, size=(15, 2)) for c in centers]
                + [rng.uniform(-15, 15, size=(5, 2))]
            )
            eps, min_pts = 1.0, 4
            within = np.linalg.norm(X[:, None] - X[None, :], axis=2) <= eps
            core = np.flatnonzero(within.sum(axis=1) >= min_pts)

            def groups(labels):
                noise = frozenset(np.flatnonzero(labels == -1).tolist())
                clusters = {}
                for i in core:
                    clusters.setdefault(int(labels[i]), set()).add(int(i))
                return noise, {frozenset(members) for members in clusters.values()}

            order = rng.permutation(len(X))
            permuted = dbscan(X[order], eps=eps, min_pts=min_pts).labels
            restored = np.empty_like(permuted)
            restored[order] = permuted
            assert groups(dbscan(X, eps=eps, min_pts=min_pts).labels) == groups(restored), trial

    def test_invalid_parameters(self):
        """Test that eps and min_pts are validated."""
        with pytest.raises(TripleEntryError):
            dbscan([[0.0]], eps=0.0, min_pts=2)
        with pytest.raises(TripleEntryError):
            dbscan([[0.0]], eps=1.0, min_pts=0)
