"""
Base column encoder for the feature pipeline.

This module provides the abstract base class every column encoder derives
from. An encoder is fitted once on a source column, keeps every statistic it
needs (categories, vocabulary, ranges) and afterwards transforms any batch
of rows without looking at the data it was fitted on again.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, List, Optional, Type

import numpy as np
import pandas as pd

from ..errors import TripleEntryError

MISSING_CATEGORY = "__missing__"
UNKNOWN_CATEGORY = "__unknown__"


class UnparseableTimestamp(TripleEntryError):
    """Raised when a timestamp value cannot be read as RFC 3339 UTC."""

    pass


class AllMissingNumericColumn(TripleEntryError):
    """Raised when a numeric column has no value to fit a mean on."""

    pass


class SchemaInvalid(TripleEntryError):
    """Raised when a serialized schema cannot be rebuilt."""

    pass


_ENCODERS: Dict[str, Type["ColumnEncoder"]] = {}


def register_encoder(cls: Type["ColumnEncoder"]) -> Type["ColumnEncoder"]:
    """Class decorator making an encoder kind available to from_dict."""
    _ENCODERS[cls.kind] = cls
    return cls


class ColumnEncoder(ABC):
    """
    Abstract base class for all column encoders.

    Subclasses implement fitting, transformation to a dense block of float
    columns, the names of those columns and their fitted parameters.
    """

    kind: ClassVar[str] = ""

    def __init__(self, source: str, logger: Optional[logging.Logger] = None):
        """
        Initialize the encoder.

        Args:
            source: Name of the frame column this encoder reads.
            logger: Optional logger instance. If None, creates a new logger.
        """
        self.source = source
        self.logger = logger or logging.getLogger(f"{__name__}.{source}")

    @classmethod
    @abstractmethod
    def fit(
        cls, values: pd.Series, source: str, logger: Optional[logging.Logger] = None
    ) -> "ColumnEncoder":
        """
        Fit an encoder on a source column.

        Args:
            values: Column values, missing entries as None/NaN.
            source: Column name.
            logger: Optional logger.

        Returns:
            A fitted encoder.
        """
        pass

    @abstractmethod
    def transform(self, values: pd.Series) -> np.ndarray:
        """
        Encode a column into a (rows, width) float64 block.

        Args:
            values: Column values in row order.

        Returns:
            Dense block whose column count equals ``width``.
        """
        pass

    @abstractmethod
    def get_feature_names(self) -> List[str]:
        """Names of the output columns, in output order."""
        pass

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        """Fitted parameters needed to rebuild the encoder."""
        pass

    @property
    def width(self) -> int:
        return len(self.get_feature_names())

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "name": self.source, **self.params()}

    @staticmethod
    def from_dict(
        data: Dict[str, Any], logger: Optional[logging.Logger] = None
    ) -> "ColumnEncoder":
        """
        Rebuild an encoder from its serialized form.

        Raises:
            SchemaInvalid: If the kind is unknown or parameters are missing.
        """
        kind = data.get("kind")
        cls = _ENCODERS.get(kind)
        if cls is None:
            raise SchemaInvalid(f"unknown column kind {kind!r}")
        try:
            return cls.from_params(data["name"], data, logger)
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaInvalid(f"column {data.get('name')!r}: {e}") from e

    @classmethod
    @abstractmethod
    def from_params(
        cls, source: str, params: Dict[str, Any], logger: Optional[logging.Logger] = None
    ) -> "ColumnEncoder":
        pass

    def validate_input(self, values: pd.Series) -> pd.Series:
        """
        Check that a column can be encoded.

        Raises:
            ValueError: If values is not a pandas Series.
        """
        if not isinstance(values, pd.Series):
            raise ValueError(f"{self.source}: expected a pandas Series, got {type(values).__name__}")
        self.logger.debug(f"{self.source}: encoding {len(values)} rows as {self.kind}")
        return values

    def __repr__(self) -> str:
        return f"{type(self).__name__}(source={self.source!r}, width={self.width})"
