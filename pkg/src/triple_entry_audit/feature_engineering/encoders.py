"""
Column encoders: one-hot, multi-hot, time delta, TF-IDF and numeric.

The module-level functions implement single encodings; the encoder classes
apply them column-wise with statistics frozen at fit time.
"""

import logging
import math
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.preprocessing import normalize

from .feature_extractor import (
    MISSING_CATEGORY,
    UNKNOWN_CATEGORY,
    AllMissingNumericColumn,
    ColumnEncoder,
    UnparseableTimestamp,
    register_encoder,
)

# Runs of Unicode letters/digits; underscore counts as a boundary
TOKEN_PATTERN = r"(?u)[^\W_]+"

SECONDS_PER_DAY = 86_400


# ============================================================================
# SINGLE-VALUE ENCODINGS
# ============================================================================


def encode_one_hot(value: Any, categories: Sequence[str]) -> np.ndarray:
    """
    One-hot vector over sorted categories plus a trailing unknown flag.

    Returns:
        Vector of length ``len(categories) + 1`` with exactly one 1.
    """
    vector = np.zeros(len(categories) + 1)
    try:
        vector[list(categories).index(value)] = 1.0
    except ValueError:
        vector[-1] = 1.0
    return vector


def _to_utc(value: Any) -> pd.Timestamp:
    try:
        ts = pd.Timestamp(value)
    except (ValueError, TypeError) as e:
        raise UnparseableTimestamp(f"cannot parse timestamp {value!r}") from e
    if ts is pd.NaT or ts.tzinfo is None:
        raise UnparseableTimestamp(f"timestamp {value!r} is not UTC-qualified")
    return ts.tz_convert("UTC")


def encode_time_delta(t: Any, reference: Any) -> int:
    """Whole days from reference to t, floored, signed."""
    delta = _to_utc(t) - _to_utc(reference)
    return int(math.floor(delta.total_seconds() / SECONDS_PER_DAY))


def tokenize(doc: Optional[str]) -> List[str]:
    """Lowercase alphanumeric tokens of a document."""
    if not doc:
        return []
    analyzer = CountVectorizer(lowercase=True, token_pattern=TOKEN_PATTERN).build_analyzer()
    return analyzer(doc)


def fit_tfidf(docs: Iterable[Optional[str]]) -> Tuple[List[str], np.ndarray]:
    """
    Vocabulary and smoothed idf weights of a corpus.

    idf = ln((1 + N) / (1 + df)) + 1, with df the number of documents that
    contain the token.

    Returns:
        (sorted vocabulary, idf vector aligned with it)
    """
    docs = [d or "" for d in docs]
    vectorizer = CountVectorizer(lowercase=True, token_pattern=TOKEN_PATTERN, binary=True)
    try:
        counts = vectorizer.fit_transform(docs)
    except ValueError:
        # every document empty
        return [], np.zeros(0)
    vocabulary = list(vectorizer.get_feature_names_out())
    df = np.asarray(counts.sum(axis=0)).ravel()
    idf = np.log((1.0 + len(docs)) / (1.0 + df)) + 1.0
    return vocabulary, idf


def encode_text_tfidf_batch(
    docs: Sequence[Optional[str]], vocabulary: Sequence[str], idf: np.ndarray
) -> np.ndarray:
    """TF-IDF rows for a batch of documents; OOV tokens are ignored."""
    if not vocabulary:
        return np.zeros((len(docs), 0))
    vectorizer = CountVectorizer(
        lowercase=True, token_pattern=TOKEN_PATTERN, vocabulary=list(vocabulary)
    )
    counts = vectorizer.transform([d or "" for d in docs]).toarray().astype(np.float64)
    return normalize(counts * np.asarray(idf)[np.newaxis, :], norm="l2")


def encode_text_tfidf(doc: Optional[str], vocabulary: Sequence[str], idf: np.ndarray) -> np.ndarray:
    """L2-normalized TF-IDF vector of one document."""
    return encode_text_tfidf_batch([doc], vocabulary, idf)[0]


def normalize_minmax(column: Any, minimum: float, maximum: float) -> np.ndarray:
    """
    Scale to [0, 1] with fitted bounds, clamping values outside them.

    A constant fitted column (min == max) maps to all zeros.
    """
    values = np.asarray(column, dtype=np.float64)
    if maximum <= minimum:
        return np.zeros_like(values)
    return np.clip((values - minimum) / (maximum - minimum), 0.0, 1.0)


def impute_missing(column: pd.Series, encoder: ColumnEncoder) -> pd.Series:
    """
    Fill missing entries with the encoder's fitted replacement.

    Numeric columns take the fitted mean; categorical columns take the
    ``__missing__`` category.
    """
    if isinstance(encoder, (NumericEncoder, TimeDeltaEncoder)):
        return pd.to_numeric(column, errors="coerce").astype(np.float64).fillna(encoder.mean)
    filled = column.astype(object).where(column.notna(), MISSING_CATEGORY)
    return filled.map(lambda v: MISSING_CATEGORY if v == "" else v)


# ============================================================================
# COLUMN ENCODERS
# ============================================================================


@register_encoder
class OneHotEncoder(ColumnEncoder):
    kind = "one_hot"

    def __init__(self, source: str, categories: List[str], logger: Optional[logging.Logger] = None):
        super().__init__(source, logger)
        self.categories = sorted(categories)

    @classmethod
    def fit(cls, values, source, logger=None):
        filled = pd.Series(values, dtype=object)
        filled = filled.where(filled.notna() & (filled != ""), MISSING_CATEGORY)
        return cls(source, sorted(set(filled)), logger)

    def transform(self, values):
        values = self.validate_input(values)
        filled = impute_missing(values, self)
        codes = pd.Categorical(filled, categories=self.categories).codes
        block = np.zeros((len(values), len(self.categories) + 1))
        unknown = codes < 0
        block[np.arange(len(values))[~unknown], codes[~unknown]] = 1.0
        block[unknown, -1] = 1.0
        if unknown.any():
            self.logger.debug(f"{self.source}: {int(unknown.sum())} unseen categories")
        return block

    def get_feature_names(self):
        return [f"{self.source}={c}" for c in self.categories] + [
            f"{self.source}={UNKNOWN_CATEGORY}"
        ]

    def params(self):
        return {"categories": list(self.categories)}

    @classmethod
    def from_params(cls, source, params, logger=None):
        return cls(source, list(params["categories"]), logger)


@register_encoder
class MultiHotEncoder(ColumnEncoder):
    """Indicator per fitted tag plus one flag for any unseen tag."""

    kind = "multi_hot"

    def __init__(
        self,
        source: str,
        categories: List[str],
        excluded: Sequence[str] = (),
        logger: Optional[logging.Logger] = None,
    ):
        super().__init__(source, logger)
        self.categories = sorted(categories)
        self.excluded = sorted(excluded)

    @staticmethod
    def _as_sets(values: pd.Series, excluded: Sequence[str]) -> List[set]:
        drop = set(excluded)
        return [
            set(v) - drop if isinstance(v, (list, tuple, set, frozenset, np.ndarray)) else set()
            for v in values
        ]

    @classmethod
    def fit(cls, values, source, logger=None, excluded: Sequence[str] = ()):
        seen = set().union(*cls._as_sets(values, excluded)) if len(values) else set()
        return cls(source, sorted(seen), excluded, logger)

    def transform(self, values):
        values = self.validate_input(values)
        index = {tag: i for i, tag in enumerate(self.categories)}
        block = np.zeros((len(values), len(self.categories) + 1))
        for row, tags in enumerate(self._as_sets(values, self.excluded)):
            for tag in tags:
                position = index.get(tag)
                if position is None:
                    block[row, -1] = 1.0
                else:
                    block[row, position] = 1.0
        return block

    def get_feature_names(self):
        return [f"{self.source}={t}" for t in self.categories] + [
            f"{self.source}={UNKNOWN_CATEGORY}"
        ]

    def params(self):
        return {"categories": list(self.categories), "excluded": list(self.excluded)}

    @classmethod
    def from_params(cls, source, params, logger=None):
        return cls(source, list(params["categories"]), params.get("excluded", ()), logger)


@register_encoder
class NumericEncoder(ColumnEncoder):
    kind = "numeric"

    def __init__(
        self,
        source: str,
        minimum: float,
        maximum: float,
        mean: float,
        logger: Optional[logging.Logger] = None,
    ):
        super().__init__(source, logger)
        if minimum > maximum:
            raise ValueError(f"{source}: min {minimum} > max {maximum}")
        self.minimum = float(minimum)
        self.maximum = float(maximum)
        self.mean = float(mean)

    @classmethod
    def fit(cls, values, source, logger=None):
        numeric = pd.to_numeric(pd.Series(values), errors="coerce").dropna()
        if numeric.empty:
            raise AllMissingNumericColumn(f"numeric column {source!r} has no values")
        return cls(source, numeric.min(), numeric.max(), numeric.mean(), logger)

    def transform(self, values):
        values = self.validate_input(values)
        filled = impute_missing(values, self)
        return normalize_minmax(filled.to_numpy(), self.minimum, self.maximum).reshape(-1, 1)

    def get_feature_names(self):
        return [self.source]

    def params(self):
        return {"max": self.maximum, "mean": self.mean, "min": self.minimum}

    @classmethod
    def from_params(cls, source, params, logger=None):
        return cls(source, params["min"], params["max"], params["mean"], logger)


@register_encoder
class TimeDeltaEncoder(ColumnEncoder):
    """
    Whole days since the earliest fitted timestamp, min-max scaled with the
    fitted day range so it sits on the same scale as numeric columns.
    """

    kind = "time_delta"

    def __init__(
        self,
        source: str,
        reference: str,
        minimum: float,
        maximum: float,
        mean: float,
        logger: Optional[logging.Logger] = None,
    ):
        super().__init__(source, logger)
        self.reference = reference
        self.minimum = float(minimum)
        self.maximum = float(maximum)
        self.mean = float(mean)

    @staticmethod
    def _days(values: pd.Series, reference: str) -> pd.Series:
        ref = pd.Timestamp(reference)
        parsed = pd.to_datetime(values, utc=True, errors="coerce")
        seconds = (parsed - ref).dt.total_seconds()
        return np.floor(seconds / SECONDS_PER_DAY)

    @classmethod
    def fit(cls, values, source, logger=None):
        parsed = pd.to_datetime(pd.Series(values), utc=True, errors="coerce").dropna()
        if parsed.empty:
            raise AllMissingNumericColumn(f"timestamp column {source!r} has no values")
        reference = parsed.min().strftime("%Y-%m-%dT%H:%M:%SZ")
        days = cls._days(pd.Series(values), reference).dropna()
        return cls(source, reference, days.min(), days.max(), days.mean(), logger)

    def transform(self, values):
        values = self.validate_input(values)
        days = self._days(values, self.reference).fillna(self.mean)
        return normalize_minmax(days.to_numpy(), self.minimum, self.maximum).reshape(-1, 1)

    def get_feature_names(self):
        return [f"{self.source}_days"]

    def params(self):
        return {
            "max": self.maximum,
            "mean": self.mean,
            "min": self.minimum,
            "reference": self.reference,
        }

    @classmethod
    def from_params(cls, source, params, logger=None):
        return cls(
            source, params["reference"], params["min"], params["max"], params["mean"], logger
        )


@register_encoder
class TfidfEncoder(ColumnEncoder):
    kind = "tfidf"

    def __init__(
        self,
        source: str,
        vocabulary: List[str],
        idf: Sequence[float],
        logger: Optional[logging.Logger] = None,
    ):
        super().__init__(source, logger)
        order = np.argsort(vocabulary, kind="stable") if vocabulary else np.array([], dtype=int)
        self.vocabulary = [vocabulary[i] for i in order]
        self.idf = np.asarray(idf, dtype=np.float64)[order] if vocabulary else np.zeros(0)

    @classmethod
    def fit(cls, values, source, logger=None):
        docs = [v if isinstance(v, str) else "" for v in values]
        vocabulary, idf = fit_tfidf(docs)
        return cls(source, vocabulary, idf, logger)

    def transform(self, values):
        values = self.validate_input(values)
        docs = [v if isinstance(v, str) else "" for v in values]
        return encode_text_tfidf_batch(docs, self.vocabulary, self.idf)

    def get_feature_names(self):
        return [f"{self.source}:{token}" for token in self.vocabulary]

    def params(self):
        return {"idf": [float(w) for w in self.idf], "vocabulary": list(self.vocabulary)}

    @classmethod
    def from_params(cls, source, params, logger=None):
        return cls(source, list(params["vocabulary"]), params["idf"], logger)
