"""
Feature engineering for triple-entry records.

Records are flattened into a frame, a schema of column encoders is fitted
on it, and the pipeline turns any batch of records into a dense matrix.
"""

from .encoders import (
    MultiHotEncoder,
    NumericEncoder,
    OneHotEncoder,
    TfidfEncoder,
    TimeDeltaEncoder,
    encode_one_hot,
    encode_text_tfidf,
    encode_time_delta,
    fit_tfidf,
    impute_missing,
    normalize_minmax,
    tokenize,
)
from .feature_extractor import (
    MISSING_CATEGORY,
    UNKNOWN_CATEGORY,
    AllMissingNumericColumn,
    ColumnEncoder,
    SchemaInvalid,
    UnparseableTimestamp,
)
from .feature_pipeline import FeatureMatrix, FeatureMatrixInvalid, FeaturePipeline
from .feature_schema import (
    DEFAULT_FIELD_ROLES,
    FeatureSchema,
    TargetSpec,
    fit_schema,
)
from .feature_selection import (
    KeepOutOfRange,
    anova_f_scores,
    recursive_feature_elimination,
)
from .record_frame import FRAME_COLUMNS, records_to_frame

__all__ = [
    "DEFAULT_FIELD_ROLES",
    "FRAME_COLUMNS",
    "MISSING_CATEGORY",
    "UNKNOWN_CATEGORY",
    "AllMissingNumericColumn",
    "ColumnEncoder",
    "FeatureMatrix",
    "FeatureMatrixInvalid",
    "FeaturePipeline",
    "FeatureSchema",
    "KeepOutOfRange",
    "MultiHotEncoder",
    "NumericEncoder",
    "OneHotEncoder",
    "SchemaInvalid",
    "TargetSpec",
    "TfidfEncoder",
    "TimeDeltaEncoder",
    "UnparseableTimestamp",
    "anova_f_scores",
    "encode_one_hot",
    "encode_text_tfidf",
    "encode_time_delta",
    "fit_schema",
    "fit_tfidf",
    "impute_missing",
    "normalize_minmax",
    "records_to_frame",
    "recursive_feature_elimination",
    "tokenize",
]
