"""
Feature schema: which record fields become which encoded columns.

A schema is fitted once from a batch of records and then reused to encode
any later batch the same way. It serializes to JSON so encodings are
reproducible across runs.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from ..errors import EmptyInput
from ..ledger import TripleEntryRecord
from .encoders import (
    MultiHotEncoder,
    NumericEncoder,
    OneHotEncoder,
    TfidfEncoder,
    TimeDeltaEncoder,
)
from .feature_extractor import ColumnEncoder, SchemaInvalid
from .record_frame import FRAME_COLUMNS, records_to_frame

module_logger = logging.getLogger(__name__)

FIELD_ROLES = ("identifier", "categorical", "numeric", "timestamp", "text", "tags", "ignore")

DEFAULT_FIELD_ROLES: Dict[str, str] = {
    "reference_key": "identifier",
    "party_from": "categorical",
    "party_to": "categorical",
    "location": "categorical",
    "currency": "categorical",
    "amount": "numeric",
    "leg_count": "numeric",
    "occurred_at": "timestamp",
    "hour_of_day": "numeric",
    "item_description": "text",
    "rationale": "text",
    "tags": "tags",
}

TAG_TARGET_PREFIX = "tag:"

# Role given to every field the roles mapping does not name
DEFAULT_ROLE_KEY = "*"


@dataclass
class TargetSpec:
    """Which field is the label, and how to read it."""

    field: str
    kind: str
    tag: Optional[str] = None
    classes: List[str] = field(default_factory=list)

    @classmethod
    def parse(cls, target: str, roles: Dict[str, str]) -> "TargetSpec":
        """
        Read a target expression: a frame column or ``tag:<name>``.

        Raises:
            SchemaInvalid: If the field is unknown or is an identifier.
        """
        if target.startswith(TAG_TARGET_PREFIX):
            tag = target[len(TAG_TARGET_PREFIX):]
            if not tag:
                raise SchemaInvalid("tag target needs a tag name")
            return cls(field="tags", kind="tag", tag=tag)
        if target not in FRAME_COLUMNS:
            raise SchemaInvalid(f"unknown target field {target!r}")
        role = roles.get(target, DEFAULT_FIELD_ROLES[target])
        if role == "identifier":
            raise SchemaInvalid(f"identifier field {target!r} cannot be a target")
        return cls(field=target, kind="numeric" if role == "numeric" else "categorical")

    @property
    def expression(self) -> str:
        return f"{TAG_TARGET_PREFIX}{self.tag}" if self.kind == "tag" else self.field

    def fit(self, frame: pd.DataFrame) -> None:
        if self.kind == "categorical":
            values = frame[self.field].dropna().astype(str)
            self.classes = sorted(set(values))

    def extract(self, frame: pd.DataFrame) -> np.ndarray:
        """Label vector aligned with the frame rows."""
        column = frame[self.field]
        if self.kind == "tag":
            return np.array([int(self.tag in (tags or ())) for tags in column], dtype=int)
        if self.kind == "numeric":
            return pd.to_numeric(column, errors="coerce").to_numpy(dtype=np.float64)
        index = {c: i for i, c in enumerate(self.classes)}
        return np.array(
            [index.get(str(v), -1) if v is not None else -1 for v in column], dtype=int
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"classes": list(self.classes), "field": self.field, "kind": self.kind, "tag": self.tag}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TargetSpec":
        return cls(
            field=data["field"],
            kind=data["kind"],
            tag=data.get("tag"),
            classes=list(data.get("classes", [])),
        )


@dataclass
class FeatureSchema:
    columns: List[ColumnEncoder]
    target: Optional[TargetSpec] = None
    roles: Dict[str, str] = field(default_factory=dict)

    @property
    def feature_names(self) -> List[str]:
        return [name for encoder in self.columns for name in encoder.get_feature_names()]

    @property
    def width(self) -> int:
        return sum(encoder.width for encoder in self.columns)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": [encoder.to_dict() for encoder in self.columns],
            "roles": dict(sorted(self.roles.items())),
            "target": self.target.to_dict() if self.target else None,
        }

    def to_json(self, path: Optional[Union[str, Path]] = None) -> str:
        """Serialize the schema; also write it when a path is given."""
        text = json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, source: Union[str, Path]) -> "FeatureSchema":
        """
        Rebuild a schema from a JSON string or a path to a JSON file.

        Raises:
            SchemaInvalid: If the document is not a valid schema.
        """
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
            columns = [ColumnEncoder.from_dict(c) for c in data["columns"]]
            target = TargetSpec.from_dict(data["target"]) if data.get("target") else None
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise SchemaInvalid(f"invalid schema document: {e}") from e
        return cls(columns=columns, target=target, roles=dict(data.get("roles", {})))


def as_frame(records: Union[pd.DataFrame, Iterable[TripleEntryRecord]]) -> pd.DataFrame:
    if isinstance(records, pd.DataFrame):
        return records
    return records_to_frame(records)


def fit_schema(
    records: Union[pd.DataFrame, Iterable[TripleEntryRecord]],
    roles: Optional[Dict[str, str]] = None,
    target: Optional[str] = None,
    logger: Optional[logging.Logger] = None,
) -> FeatureSchema:
    """
    Fit encoders for every feature field of a record batch.

    Args:
        records: Records (or a frame from records_to_frame).
        roles: Field roles overriding DEFAULT_FIELD_ROLES. A field mapped to
            ``ignore`` or ``identifier`` is not encoded. A ``"*"`` entry sets
            the role of every field not named, e.g. ``{"*": "ignore",
            "amount": "numeric"}`` encodes the amount only.
        target: Target expression, a field name or ``tag:<name>``; the target
            field is excluded from the features.
        logger: Optional logger.

    Returns:
        The fitted schema.

    Raises:
        EmptyInput: If there are no records.
        SchemaInvalid: If a role or target is not recognised.
    """
    log = logger or module_logger
    frame = as_frame(records)
    if frame.empty:
        raise EmptyInput("cannot fit a feature schema on zero records")

    merged_roles = dict(DEFAULT_FIELD_ROLES)
    if roles:
        roles = dict(roles)
        fallback = roles.pop(DEFAULT_ROLE_KEY, None)
        if fallback is not None:
            merged_roles = {
                name: "identifier" if name == "reference_key" else fallback
                for name in FRAME_COLUMNS
            }
        unknown = set(roles) - set(FRAME_COLUMNS)
        if unknown:
            raise SchemaInvalid(f"roles name unknown fields: {sorted(unknown)}")
        bad = {r for r in [*roles.values(), fallback] if r is not None and r not in FIELD_ROLES}
        if bad:
            raise SchemaInvalid(f"unknown roles: {sorted(bad)}")
        merged_roles.update(roles)

    target_spec = TargetSpec.parse(target, merged_roles) if target else None
    if target_spec is not None:
        target_spec.fit(frame)

    columns: List[ColumnEncoder] = []
    for name in FRAME_COLUMNS:
        role = merged_roles[name]
        if role in ("identifier", "ignore"):
            continue
        if target_spec is not None and target_spec.kind != "tag" and name == target_spec.field:
            continue

        values = frame[name]
        if role == "categorical":
            encoder = OneHotEncoder.fit(values, name, log)
            if len(encoder.categories) <= 1:
                log.info(f"Dropping constant categorical column '{name}'")
                continue
        elif role == "numeric":
            encoder = NumericEncoder.fit(values, name, log)
        elif role == "timestamp":
            encoder = TimeDeltaEncoder.fit(values, name, log)
        elif role == "text":
            encoder = TfidfEncoder.fit(values, name, log)
            if not encoder.vocabulary:
                log.info(f"Dropping text column '{name}' with empty vocabulary")
                continue
        else:
            excluded = [target_spec.tag] if target_spec and target_spec.kind == "tag" else []
            encoder = MultiHotEncoder.fit(values, name, log, excluded=excluded)
            if not encoder.categories:
                log.info(f"Dropping tag column '{name}' with no tags")
                continue
        columns.append(encoder)

    schema = FeatureSchema(columns=columns, target=target_spec, roles=merged_roles)
    log.info(
        f"Fitted schema on {len(frame):,} records: {len(columns)} fields -> {schema.width} columns"
    )
    return schema
