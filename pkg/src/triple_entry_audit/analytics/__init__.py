"""
Analytics over feature matrices: classification, clustering, anomaly
detection, forecasting and evaluation metrics.
"""

from .anomaly import (
    AnomalyReport,
    IsolationTree,
    TooFewRows,
    average_path_length,
    build_isolation_forest,
    flag_scores,
    isolation_forest_scores,
    lof_scores,
)
from .classification import (
    DecisionTree,
    LogisticConfig,
    LogisticModel,
    ModelInvalid,
    NonFiniteFeature,
    TreeConfig,
    logistic_gradient,
    logistic_loss,
    logistic_trainer,
    model_from_dict,
    model_to_dict,
    predict_logistic,
    predict_logistic_proba,
    predict_tree,
    predict_tree_proba,
    train_decision_tree,
    train_logistic,
    tree_trainer,
)
from .clustering import ClusterAssignment, InertiaIncreased, dbscan, kmeans
from .forecast import DegenerateTimeAxis, Forecast, daily_series, linear_forecast
from .metrics import (
    ClassificationMetrics,
    FractionOutOfRange,
    SingleCluster,
    classification_metrics,
    roc_auc,
    silhouette_score,
    split_indices,
    train_test_split,
)

__all__ = [
    "AnomalyReport",
    "ClassificationMetrics",
    "ClusterAssignment",
    "DecisionTree",
    "DegenerateTimeAxis",
    "Forecast",
    "FractionOutOfRange",
    "InertiaIncreased",
    "IsolationTree",
    "LogisticConfig",
    "LogisticModel",
    "ModelInvalid",
    "NonFiniteFeature",
    "SingleCluster",
    "TooFewRows",
    "TreeConfig",
    "average_path_length",
    "build_isolation_forest",
    "classification_metrics",
    "daily_series",
    "dbscan",
    "flag_scores",
    "isolation_forest_scores",
    "kmeans",
    "linear_forecast",
    "lof_scores",
    "logistic_gradient",
    "logistic_loss",
    "logistic_trainer",
    "model_from_dict",
    "model_to_dict",
    "predict_logistic",
    "predict_logistic_proba",
    "predict_tree",
    "predict_tree_proba",
    "roc_auc",
    "silhouette_score",
    "split_indices",
    "train_decision_tree",
    "train_logistic",
    "train_test_split",
    "tree_trainer",
]
