"""
Tests for isolation forest and local outlier factor scoring.
"""

import numpy as np
import pytest

from triple_entry_audit.analytics import (
    TooFewRows,
    average_path_length,
    build_isolation_forest,
    flag_scores,
    isolation_forest_scores,
    lof_scores,
)
from triple_entry_audit.errors import KOutOfRange


def _reference_lof(X, k):
    """Direct LOF over Python loops, ties at the k-distance included."""
    n = len(X)
    dist = [[float(np.linalg.norm(X[i] - X[j])) for j in range(n)] for i in range(n)]
    k_dist, neighbourhood = [], []
    for i in range(n):
        others = sorted(dist[i][j] for j in range(n) if j != i)
        k_dist.append(others[k - 1])
        neighbourhood.append([j for j in range(n) if j != i and dist[i][j] <= others[k - 1]])
    lrd = []
    for i in range(n):
        reach = [max(k_dist[j], dist[i][j]) for j in neighbourhood[i]]
        lrd.append(1.0 / max(sum(reach) / len(reach), 1e-12))
    return np.array(
        [sum(lrd[j] for j in neighbourhood[i]) / len(neighbourhood[i]) / lrd[i] for i in range(n)]
    )


class TestIsolationForest:
    """Test suite for isolation forest scoring."""

    @pytest.fixture
    def cloud_with_outlier(self):
        X = np.random.default_rng(7).normal(size=(200, 2))
        return np.vstack([X, [[100.0, 100.0]]])

    def test_average_path_length(self):
        """Test the BST path normalizer at small sizes."""
        assert average_path_length(1) == 0.0
        assert average_path_length(2) == 1.0
        harmonic = sum(1.0 / i for i in range(1, 256))
        assert average_path_length(256) == pytest.approx(2 * harmonic - 2 * 255 / 256)

    def test_outlier_scores_highest(self, cloud_with_outlier):
        """Test that a far point gets the maximum score."""
        report = isolation_forest_scores(
            cloud_with_outlier, trees=100, subsample=64, seed=42, contamination=0.01
        )
        assert int(np.argmax(report.scores)) == len(cloud_with_outlier) - 1
        assert report.flagged[-1]
        assert np.all((report.scores > 0) & (report.scores < 1))

    def test_duplicate_rows_score_equally(self, cloud_with_outlier):
        """Test that identical rows cannot be told apart."""
        X = np.vstack([cloud_with_outlier, cloud_with_outlier[5]])
        scores = isolation_forest_scores(X, trees=50, seed=1).scores
        assert scores[5] == scores[-1]

    def test_deterministic_given_seed(self, cloud_with_outlier):
        """Test identical scores for identical seeds."""
        a = isolation_forest_scores(cloud_with_outlier, trees=20, seed=3).scores
        b = isolation_forest_scores(cloud_with_outlier, trees=20, seed=3).scores
        np.testing.assert_array_equal(a, b)

    def test_shift_invariant(self):
        """Test that adding a constant to every feature leaves the scores unchanged."""
        rng = np.random.default_rng(17)
        for trial in range(10):
            X = rng.normal(size=(80, 3))
            base = isolation_forest_scores(X, trees=30, subsample=32, seed=trial).scores
            for shift in (5.0, -2.5):
                shifted = isolation_forest_scores(X + shift, trees=30, subsample=32, seed=trial)
                np.testing.assert_allclose(shifted.scores, base, rtol=0, atol=1e-9)

    def test_constant_features_never_split(self):
        """Test that splits only use features that vary in the node."""
        X = np.column_stack([np.zeros(30), np.arange(30.0)])
        forest = build_isolation_forest(X, trees=10, seed=0)
        used = {f for tree in forest for f in tree.feature if f >= 0}
        assert used == {1}

    def test_too_few_rows(self):
        """Test that a single row cannot be scored."""
        with pytest.raises(TooFewRows):
            isolation_forest_scores([[1.0, 2.0]], seed=0)


class TestLocalOutlierFactor:
    """Test suite for LOF scoring."""

    def test_matches_reference_implementation(self):
        """Test vectorized LOF against a direct loop computation."""
        rng = np.random.default_rng(13)
        for _ in range(20):
            X = rng.normal(size=(50, 3))
            np.testing.assert_allclose(lof_scores(X, k=5).scores, _reference_lof(X, 5), rtol=1e-9)

    def test_grid_interior_is_inlier(self):
        """Test that the centre of a regular grid scores about 1."""
        X = np.array([[i, j] for i in range(7) for j in range(7)], dtype=float)
        scores = lof_scores(X, k=4).scores
        centre = 3 * 7 + 3
        assert 0.8 <= scores[centre] <= 1.2

    def test_duplicates_give_finite_scores(self):
        """Test that zero reachability distances stay finite."""
        X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [5.0, 5.0]])
        scores = lof_scores(X, k=1).scores
        assert np.all(np.isfinite(scores))

    def test_translation_invariant(self):
        """Test that shifting every row leaves the scores unchanged."""
        X = np.random.default_rng(2).normal(size=(40, 2))
        np.testing.assert_allclose(
            lof_scores(X, k=5).scores, lof_scores(X + 1000.0, k=5).scores, rtol=1e-6
        )

    def test_outlier_flagged(self):
        """Test that a far point is flagged."""
        X = np.vstack([np.random.default_rng(4).normal(size=(60, 2)), [[30.0, -30.0]]])
        report = lof_scores(X, k=10, contamination=0.02)
        assert report.flagged[-1]
        assert report.method == "lof"

    def test_k_out_of_range(self):
        """Test that k needs k + 1 rows."""
        with pytest.raises(KOutOfRange):
            lof_scores(np.zeros((3, 2)), k=3)
        with pytest.raises(KOutOfRange):
            lof_scores(np.zeros((3, 2)), k=0)


class TestFlagScores:
    """Test suite for contamination thresholding."""

    def test_ties_at_threshold_are_flagged(self):
        """Test that every score equal to the threshold is flagged."""
        report = flag_scores(np.array([0.1, 0.9, 0.5, 0.9]), "x", contamination=0.25)
        assert report.threshold == 0.9
        assert report.flagged.tolist() == [False, True, False, True]
        assert report.top(2) == [1, 3]

    def test_zero_contamination_flags_nothing(self):
        """Test the empty flag set."""
        report = flag_scores(np.array([0.3, 0.7]), "x", contamination=0.0)
        assert not report.flagged.any()
        assert report.to_dict(["a", "b"])["flagged"] == []
