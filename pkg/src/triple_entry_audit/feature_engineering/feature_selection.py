"""
Feature ranking and selection: ANOVA F scores and recursive elimination.
"""

import logging
from typing import Callable, List, Optional, Protocol, Union

import numpy as np

from ..errors import SingleClass, TripleEntryError
from .feature_pipeline import FeatureMatrix

logger = logging.getLogger(__name__)

ROUNDING_ULPS = 64
SSW_RELATIVE_TOLERANCE = 1e-12


class KeepOutOfRange(TripleEntryError):
    """Raised when the number of features to keep is not in [1, feature count]."""

    pass


class WeightedModel(Protocol):
    def feature_weights(self) -> np.ndarray: ...


Trainer = Callable[[np.ndarray, np.ndarray, int], WeightedModel]


def _values(X: Union[FeatureMatrix, np.ndarray]) -> np.ndarray:
    values = X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    return values.reshape(len(values), -1)


def anova_f_scores(X: Union[FeatureMatrix, np.ndarray], y: np.ndarray) -> np.ndarray:
    """
    One-way ANOVA F statistic per feature.

    A feature with zero within-class variance scores +inf when its class
    means differ and 0 when they do not.

    Raises:
        SingleClass: If y holds fewer than two classes.
    """
    values = _values(X)
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise SingleClass("ANOVA needs at least two classes")

    n = len(y)
    grand_mean = values.mean(axis=0)
    ssb = np.zeros(values.shape[1])
    ssw = np.zeros(values.shape[1])
    for c in classes:
        members = values[y == c]
        class_mean = members.mean(axis=0)
        ssb += len(members) * (class_mean - grand_mean) ** 2
        ssw += ((members - class_mean) ** 2).sum(axis=0)

    # sums of squares below the rounding noise of the class means count as zero
    noise = n * (ROUNDING_ULPS * np.finfo(np.float64).eps * np.abs(values).max(axis=0)) ** 2
    zero_within = ssw <= np.maximum(noise, SSW_RELATIVE_TOLERANCE * (ssb + ssw))
    zero_between = ssb <= noise

    df_between = len(classes) - 1
    df_within = n - len(classes)
    scores = np.zeros(values.shape[1])
    finite = ~zero_within & ~zero_between
    if df_within > 0:
        scores[finite] = (ssb[finite] / df_between) / (ssw[finite] / df_within)
    scores[zero_within & ~zero_between] = np.inf
    return scores


def recursive_feature_elimination(
    X: FeatureMatrix,
    y: np.ndarray,
    keep: int,
    trainer: Trainer,
    seed: int,
    log: Optional[logging.Logger] = None,
) -> List[str]:
    """
    Drop the weakest feature until ``keep`` remain.

    Each round retrains on the surviving columns and removes the feature with
    the smallest absolute weight; equal weights remove the lexicographically
    smallest column name first.

    Args:
        X: Feature matrix.
        y: Labels.
        keep: Number of features to keep.
        trainer: ``trainer(values, y, seed)`` returning a model with
            ``feature_weights()``.
        seed: Seed passed to every training round.

    Returns:
        Surviving column names in their original order.

    Raises:
        KeepOutOfRange: If keep is not in [1, feature count].
    """
    log = log or logger
    if not 1 <= keep <= len(X.columns):
        raise KeepOutOfRange(f"keep must be in [1, {len(X.columns)}], got {keep}")

    surviving = list(X.columns)
    while len(surviving) > keep:
        model = trainer(X.select(surviving).values, y, seed)
        weights = np.abs(np.asarray(model.feature_weights(), dtype=np.float64))
        weakest = min(range(len(surviving)), key=lambda i: (weights[i], surviving[i]))
        log.debug(f"RFE dropping {surviving[weakest]} (|w|={weights[weakest]:.3g})")
        surviving.pop(weakest)

    log.info(f"RFE kept {len(surviving)} of {len(X.columns)} features")
    return [name for name in X.columns if name in surviving]
