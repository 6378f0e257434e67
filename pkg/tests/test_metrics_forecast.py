"""
Tests for evaluation metrics, the train/test split and linear forecasting.
"""

import numpy as np
import pytest

from triple_entry_audit.analytics import (
    DegenerateTimeAxis,
    FractionOutOfRange,
    SingleCluster,
    classification_metrics,
    daily_series,
    linear_forecast,
    roc_auc,
    silhouette_score,
    split_indices,
    train_test_split,
)
from triple_entry_audit.errors import EmptyInput, LengthMismatch, SingleClass


class TestClassificationMetrics:
    """Test suite for classification_metrics and roc_auc."""

    def test_confusion_example(self):
        """Test TP=2, FP=1, FN=1, TN=6."""
        y_true = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
        y_pred = [1, 1, 0, 1, 0, 0, 0, 0, 0, 0]
        result = classification_metrics(y_true, y_pred)
        assert result.precision == pytest.approx(2 / 3)
        assert result.recall == pytest.approx(2 / 3)
        assert result.f1 == pytest.approx(2 / 3)
        assert result.accuracy == pytest.approx(0.8)

    def test_zero_denominators(self):
        """Test that no positive predictions give precision 0."""
        result = classification_metrics([1, 0], [0, 0])
        assert result.precision == 0.0
        assert result.f1 == 0.0

    def test_length_and_empty_checks(self):
        """Test input validation."""
        with pytest.raises(LengthMismatch):
            classification_metrics([1, 0], [1])
        with pytest.raises(EmptyInput):
            classification_metrics([], [])

    @pytest.mark.parametrize(
        "scores,expected",
        [
            ([0.1, 0.2, 0.8, 0.9], 1.0),
            ([0.9, 0.8, 0.2, 0.1], 0.0),
            ([0.5, 0.5, 0.5, 0.5], 0.5),
        ],
    )
    def test_auc_examples(self, scores, expected):
        """Test perfect, inverted and tied rankings."""
        assert roc_auc([0, 0, 1, 1], scores) == pytest.approx(expected)

    def test_auc_invariant_to_monotone_transform(self):
        """Test that AUC depends only on the ranking."""
        rng = np.random.default_rng(6)
        y = rng.integers(0, 2, size=100)
        y[:2] = [0, 1]
        scores = rng.normal(size=100)
        assert roc_auc(y, scores) == pytest.approx(roc_auc(y, np.exp(3 * scores) + 7))

    def test_auc_needs_both_classes(self):
        """Test the single-class error."""
        with pytest.raises(SingleClass):
            roc_auc([1, 1], [0.2, 0.3])


class TestSilhouette:
    """Test suite for silhouette_score."""

    def test_well_separated_clusters(self):
        """Test a near-perfect silhouette."""
        X = np.array([[0.0], [0.01], [100.0], [100.01]])
        assert silhouette_score(X, [0, 0, 1, 1]) > 0.99

    def test_all_singletons(self):
        """Test that singleton clusters contribute 0."""
        assert silhouette_score([[0.0], [1.0], [2.0]], [0, 1, 2]) == 0.0

    def test_single_cluster(self):
        """Test that one cluster is refused."""
        with pytest.raises(SingleCluster):
            silhouette_score([[0.0], [1.0]], [0, 0])


class TestSplit:
    """Test suite for the seeded train/test split."""

    def test_sizes(self):
        """Test that 10 rows at 0.3 split 7/3."""
        train, test = split_indices(10, 0.3, seed=0)
        assert (len(train), len(test)) == (7, 3)
        assert sorted(np.concatenate([train, test]).tolist()) == list(range(10))

    def test_reproducible(self):
        """Test that the same seed yields the same split."""
        a = split_indices(50, 0.2, seed=5)
        b = split_indices(50, 0.2, seed=5)
        assert a[0].tolist() == b[0].tolist()

    def test_split_arrays(self):
        """Test that rows and labels stay aligned."""
        X = np.arange(20).reshape(10, 2)
        y = np.arange(10)
        (X_train, y_train), (X_test, y_test) = train_test_split(X, y, 0.3, seed=1)
        assert (X_train[:, 0] // 2).tolist() == y_train.tolist()
        assert (X_test[:, 0] // 2).tolist() == y_test.tolist()

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1])
    def test_fraction_out_of_range(self, fraction):
        """Test that fractions must lie strictly inside (0, 1)."""
        with pytest.raises(FractionOutOfRange):
            split_indices(10, fraction, seed=0)


class TestForecast:
    """Test suite for linear_forecast and daily_series."""

    def test_exact_line(self):
        """Test that y = 2t + 1 is recovered exactly."""
        series = [(t, 2 * t + 1) for t in range(5)]
        forecast = linear_forecast(series, horizon=10)
        assert forecast.slope == pytest.approx(2.0)
        assert forecast.intercept == pytest.approx(1.0)
        assert forecast.prediction == pytest.approx(21.0)

    def test_degenerate_time_axis(self):
        """Test that one distinct time point is refused."""
        with pytest.raises(DegenerateTimeAxis):
            linear_forecast([(3, 1.0), (3, 2.0)], horizon=4)

    def test_daily_series(self, make_record):
        """Test per-day totals indexed from the first active day."""
        records = [
            make_record("T1", 100, occurred_at="2024-03-01T08:00:00Z"),
            make_record("T2", 50, occurred_at="2024-03-01T20:00:00Z"),
            make_record("T3", 70, occurred_at="2024-03-04T09:00:00Z"),
            make_record("T4", 999, occurred_at="2024-03-04T09:00:00Z", currency="EUR"),
        ]
        assert daily_series(records, currency="USD") == [(0.0, 150.0), (3.0, 70.0)]
        with pytest.raises(EmptyInput):
            daily_series(records, currency="GBP")
