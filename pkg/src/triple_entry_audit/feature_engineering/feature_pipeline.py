"""
Feature Pipeline for the triple-entry audit toolkit.

This module provides the orchestration of the encoding process: flattening
records into a frame, fitting or reusing a schema, encoding every column,
validating the resulting matrix and writing it out.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import EmptyInput, TripleEntryError
from ..ledger import TripleEntryRecord
from .feature_schema import FeatureSchema, as_frame, fit_schema


class FeatureMatrixInvalid(TripleEntryError):
    """Raised when an encoded matrix contains NaN/inf or has the wrong width."""

    pass


@dataclass
class FeatureMatrix:
    """Dense float64 matrix with named columns and an optional target vector."""

    values: np.ndarray
    columns: List[str]
    row_keys: List[str] = field(default_factory=list)
    target: Optional[np.ndarray] = None

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    def select(self, columns: Sequence[str]) -> "FeatureMatrix":
        """Matrix restricted to the named columns, in the given order."""
        positions = [self.columns.index(name) for name in columns]
        return FeatureMatrix(
            values=self.values[:, positions],
            columns=list(columns),
            row_keys=list(self.row_keys),
            target=self.target,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=self.columns)
        frame.insert(0, "reference_key", self.row_keys)
        if self.target is not None:
            frame["__target__"] = self.target
        return frame

    def save_parquet(self, output_path: Union[str, Path]) -> Path:
        """
        Save the matrix to a Parquet file.

        Args:
            output_path: Path to save the file.

        Returns:
            The path written.
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_parquet(output_path, index=False, compression="snappy")
        return output_path


class FeaturePipeline:
    """
    Orchestrates encoding of triple-entry records into a feature matrix.

    The pipeline fits a FeatureSchema on one batch of records and applies it
    unchanged to every later batch, so statistics never leak from evaluation
    data into the encoders.
    """

    def __init__(
        self,
        roles: Optional[Dict[str, str]] = None,
        target: Optional[str] = None,
        schema: Optional[FeatureSchema] = None,
        logger: Optional[logging.Logger] = None,
    ):
        """
        Initialize the feature pipeline.

        Args:
            roles: Field roles passed to fit_schema.
            target: Target expression passed to fit_schema.
            schema: An already fitted schema; fit() is then unnecessary.
            logger: Optional logger instance.
        """
        self.roles = roles
        self.target = target
        self.schema = schema
        self.logger = logger or logging.getLogger(__name__)
        self._pipeline_stats: Dict[str, float] = {}

    @classmethod
    def from_schema(
        cls, schema: FeatureSchema, logger: Optional[logging.Logger] = None
    ) -> "FeaturePipeline":
        return cls(schema=schema, logger=logger)

    def fit(self, records: Union[pd.DataFrame, Iterable[TripleEntryRecord]]) -> FeatureSchema:
        """Fit the schema on a batch of records."""
        self.schema = fit_schema(records, self.roles, self.target, self.logger)
        return self.schema

    def transform(self, records: Union[pd.DataFrame, Iterable[TripleEntryRecord]]) -> FeatureMatrix:
        """
        Encode records with the fitted schema.

        Raises:
            EmptyInput: If the pipeline has not been fitted.
            FeatureMatrixInvalid: If the encoded matrix fails validation.
        """
        if self.schema is None:
            raise EmptyInput("feature pipeline used before fit")
        frame = as_frame(records)

        blocks = [encoder.transform(frame[encoder.source]) for encoder in self.schema.columns]
        values = (
            np.hstack(blocks).astype(np.float64)
            if blocks
            else np.zeros((len(frame), 0), dtype=np.float64)
        )
        values = self._validate_feature_matrix(values)

        target = None
        if self.schema.target is not None:
            target = self.schema.target.extract(frame)

        return FeatureMatrix(
            values=values,
            columns=self.schema.feature_names,
            row_keys=frame["reference_key"].astype(str).tolist(),
            target=target,
        )

    def fit_transform(self, records: Union[pd.DataFrame, Iterable[TripleEntryRecord]]) -> FeatureMatrix:
        frame = as_frame(records)
        self.fit(frame)
        return self.transform(frame)

    def run_pipeline(
        self,
        records: Iterable[TripleEntryRecord],
        output_path: Optional[Path] = None,
        schema_path: Optional[Path] = None,
    ) -> FeatureMatrix:
        """
        Run the complete encoding pipeline.

        Args:
            records: Records to encode.
            output_path: Optional Parquet destination for the matrix.
            schema_path: Optional JSON destination for the fitted schema.

        Returns:
            The encoded feature matrix.
        """
        start_time = time.time()

        self.logger.info("=" * 60)
        self.logger.info("STARTING FEATURE ENCODING PIPELINE")
        self.logger.info("=" * 60)

        # Step 1: Flatten records
        self.logger.info("Step 1: Flattening records...")
        frame = as_frame(records)
        self.logger.info(f"Flattened {len(frame):,} records")

        # Step 2: Fit schema unless one was supplied
        if self.schema is None:
            self.logger.info("Step 2: Fitting feature schema...")
            self.fit(frame)
        else:
            self.logger.info("Step 2: Reusing supplied feature schema")

        # Step 3: Encode
        self.logger.info("Step 3: Encoding columns...")
        matrix = self.transform(frame)
        self.logger.info(f"Feature matrix shape: {matrix.values.shape}")

        # Step 4: Save outputs
        if output_path is not None:
            self.logger.info(f"Step 4: Saving feature matrix to {output_path}...")
            self._save_feature_matrix(matrix, Path(output_path))
        if schema_path is not None:
            self.schema.to_json(schema_path)
            self.logger.info(f"Saved feature schema to {schema_path}")

        self._pipeline_stats = {"execution_time_seconds": time.time() - start_time}
        self.logger.info("=" * 60)
        self.logger.info("FEATURE ENCODING PIPELINE COMPLETED")
        self.logger.info("=" * 60)
        return matrix

    def _validate_feature_matrix(self, values: np.ndarray) -> np.ndarray:
        """
        Check the encoded matrix against the schema.

        Raises:
            FeatureMatrixInvalid: On NaN/inf entries or a width other than the
                schema's.
        """
        if values.shape[1] != self.schema.width:
            raise FeatureMatrixInvalid(
                f"matrix width {values.shape[1]} != schema width {self.schema.width}"
            )
        bad = ~np.isfinite(values)
        if bad.any():
            columns = sorted({self.schema.feature_names[j] for j in np.where(bad)[1]})
            self.logger.error(f"Non-finite values in columns: {columns}")
            raise FeatureMatrixInvalid(f"non-finite values in {columns}")
        return values

    def _save_feature_matrix(self, matrix: FeatureMatrix, output_path: Path) -> None:
        try:
            matrix.save_parquet(output_path)
            file_size_mb = output_path.stat().st_size / (1024 * 1024)
            self.logger.info(
                f"Successfully saved feature matrix: {output_path} "
                f"({file_size_mb:.2f} MB, {matrix.rows:,} rows, {len(matrix.columns)} features)"
            )
        except Exception as e:
            self.logger.error(f"Failed to save feature matrix: {e}")
            raise
