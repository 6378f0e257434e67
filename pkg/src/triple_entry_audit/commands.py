"""
Command handlers behind the command-line interface.

Every handler takes a validated RunConfig and returns a CommandResult: the
JSON-ready result payload and the exit code. Handlers never write to an
input path; outputs go to ``--out`` (and ``--schema-out`` for encode).
"""

import dataclasses
import json
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from . import analytics
from .config import RunConfig
from .errors import ConfigError, SingleClass, TripleEntryError
from .feature_engineering import FeaturePipeline, anova_f_scores
from .ledger import (
    LedgerChain,
    LedgerFileInvalid,
    TripleEntryRecord,
    append_record,
    load_chain,
    save_chain,
    verify_chain,
)
from .mining import (
    build_transaction_db,
    frequent_itemsets_apriori,
    frequent_itemsets_eclat,
    generate_rules,
)
from .mpc import (
    AuditTranscript,
    emit_attestation,
    find_attestation,
    parse_predicate,
    private_record_linkage,
    run_compliance_audit,
    verify_attestation,
)
from .reconcile import IngestMapping, ingest_records, reconcile

logger = logging.getLogger(__name__)

ANOVA_TOP_FEATURES = 10


@dataclass
class CommandResult:
    result: Dict[str, Any]
    exit_code: int = 0


def _load_roles(config: RunConfig) -> Optional[Dict[str, str]]:
    if config.ROLES_PATH is None:
        return None
    try:
        roles = json.loads(config.ROLES_PATH.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read roles file {config.ROLES_PATH}: {e}") from e
    if not isinstance(roles, dict):
        raise ConfigError("roles file must hold a JSON object of field -> role")
    return roles


def _single_chain(config: RunConfig) -> LedgerChain:
    return load_chain(config.LEDGER_PATHS[0], owner=config.OWNER)


def _party_chains(config: RunConfig) -> Dict[str, LedgerChain]:
    return {
        party: load_chain(path, owner=party)
        for party, path in zip(config.PARTIES, config.LEDGER_PATHS)
    }


def _chain_summary(chain: LedgerChain) -> Dict[str, Any]:
    return {"owner": chain.owner, "records": len(chain), "tail_hash": chain.tail_hash}


# ============================================================================
# LEDGER COMMANDS
# ============================================================================


def run_init(config: RunConfig) -> CommandResult:
    chain = LedgerChain(owner=config.OWNER)
    save_chain(chain, config.OUT_PATH)
    return CommandResult({"chain": _chain_summary(chain), "out": str(config.OUT_PATH)})


def run_record(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    try:
        data = json.loads(config.RECORD_PATH.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read record file {config.RECORD_PATH}: {e}") from e
    chain = append_record(chain, TripleEntryRecord.from_dict(data))
    save_chain(chain, config.OUT_PATH)
    appended = chain.records[-1]
    return CommandResult(
        {
            "appended": appended.reference_key,
            "chain": _chain_summary(chain),
            "record_hash": appended.record_hash,
        }
    )


def run_verify(config: RunConfig) -> CommandResult:
    path = config.LEDGER_PATHS[0]
    try:
        chain = load_chain(path, owner=config.OWNER, verify=False)
    except LedgerFileInvalid as e:
        failing_index = e.line - 1 if e.line > 0 else None
        result = {"failing_index": failing_index, "ok": False, "reason": e.reason, "records": None}
        return CommandResult(result, exit_code=1)

    verification = verify_chain(chain)
    result = {**verification.to_dict(), "records": len(chain)}
    if not verification.ok:
        logger.warning(f"Verification of {path} failed at index {verification.failing_index}")
    return CommandResult(result, exit_code=0 if verification.ok else 1)


def run_ingest(config: RunConfig) -> CommandResult:
    mapping = IngestMapping.from_json(config.MAPPING_PATH)
    if config.DELIMITER:
        mapping = dataclasses.replace(mapping, delimiter=config.DELIMITER)
    records, report = ingest_records(config.SOURCE_PATH, mapping)

    chain = _single_chain(config) if config.LEDGER_PATHS else LedgerChain(owner=config.OWNER)
    # rows accepted by ingest can still collide with keys already on the ledger
    for record in records:
        try:
            chain = append_record(chain, record)
        except TripleEntryError as e:
            report.accepted -= 1
            report.rejected.append((0, f"{record.reference_key}: {e}"))
            logger.warning(f"Could not append {record.reference_key}: {e}")
    save_chain(chain, config.OUT_PATH)
    return CommandResult({"chain": _chain_summary(chain), "ingest": report.to_dict()})


def run_reconcile(config: RunConfig) -> CommandResult:
    chains = [load_chain(p, owner=o) for p, o in zip(config.LEDGER_PATHS, config.PARTIES)]
    report = reconcile(chains[0], chains[1])
    return CommandResult(report.to_dict())


# ============================================================================
# ANALYTICS COMMANDS
# ============================================================================


def _binary_target(y: Optional[np.ndarray], target: str) -> np.ndarray:
    if y is None:
        raise ConfigError(f"target {target!r} produced no labels")
    values = set(np.unique(y).tolist())
    if not values <= {0, 1}:
        raise SingleClass(f"target {target!r} is not binary: values {sorted(values)}")
    return np.asarray(y, dtype=int)


def run_encode(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    pipeline = FeaturePipeline(roles=_load_roles(config), target=config.TARGET)
    matrix = pipeline.run_pipeline(chain.records, config.OUT_PATH, config.SCHEMA_OUT)
    return CommandResult(
        {
            "columns": len(matrix.columns),
            "feature_names": matrix.columns,
            "rows": matrix.rows,
            "target": pipeline.schema.target.to_dict() if pipeline.schema.target else None,
        }
    )


def run_train(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    records = list(chain.records)
    train_idx, test_idx = analytics.split_indices(len(records), config.TEST_FRACTION, config.SEED)
    train_records = [records[i] for i in sorted(train_idx)]
    test_records = [records[i] for i in sorted(test_idx)]

    pipeline = FeaturePipeline(roles=_load_roles(config), target=config.TARGET)
    train_matrix = pipeline.fit_transform(train_records)
    test_matrix = pipeline.transform(test_records)
    y_train = _binary_target(train_matrix.target, config.TARGET)
    y_test = _binary_target(test_matrix.target, config.TARGET)

    if config.METHOD == "logistic":
        model = analytics.train_logistic(
            train_matrix.values, y_train, analytics.LogisticConfig(seed=config.SEED)
        )
        predicted = analytics.predict_logistic(model, test_matrix.values)
        scores = analytics.predict_logistic_proba(model, test_matrix.values)
        summary = {"iterations": model.n_iter, "final_loss": model.loss_history[-1]}
    else:
        model = analytics.train_decision_tree(
            train_matrix.values, y_train, analytics.TreeConfig()
        )
        predicted = analytics.predict_tree(model, test_matrix.values)
        scores = analytics.predict_tree_proba(model, test_matrix.values)
        summary = {"depth": model.depth, "nodes": len(model.nodes)}

    try:
        auc = analytics.roc_auc(y_test, scores)
    except SingleClass:
        logger.warning("Test split holds a single class; ROC AUC not reported")
        auc = None

    f_scores = anova_f_scores(train_matrix.values, y_train)
    ranked = sorted(
        zip(train_matrix.columns, f_scores), key=lambda kv: (-kv[1], kv[0])
    )[:ANOVA_TOP_FEATURES]

    if config.OUT_PATH is not None:
        document = {
            "model": analytics.model_to_dict(model),
            "schema": pipeline.schema.to_dict(),
        }
        config.OUT_PATH.write_text(
            json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    return CommandResult(
        {
            "anova_top_features": [{"feature": n, "f_score": s} for n, s in ranked],
            "metrics": analytics.classification_metrics(y_test, predicted).to_dict(),
            "model": summary,
            "roc_auc": auc,
            "test_rows": len(test_records),
            "train_rows": len(train_records),
        }
    )


def run_detect(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    pipeline = FeaturePipeline(roles=_load_roles(config), target=config.TARGET)
    matrix = pipeline.fit_transform(chain.records)

    if config.METHOD == "iforest":
        report = analytics.isolation_forest_scores(
            matrix.values,
            trees=config.TREES,
            subsample=config.SUBSAMPLE,
            seed=config.SEED,
            contamination=config.CONTAMINATION,
        )
    else:
        report = analytics.lof_scores(matrix.values, k=config.K, contamination=config.CONTAMINATION)

    result = report.to_dict(matrix.row_keys)
    if matrix.target is not None:
        try:
            result["roc_auc"] = analytics.roc_auc(matrix.target, report.scores)
        except SingleClass:
            result["roc_auc"] = None
    return CommandResult(result)


def run_cluster(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    matrix = FeaturePipeline(roles=_load_roles(config)).fit_transform(chain.records)

    if config.METHOD == "kmeans":
        assignment = analytics.kmeans(matrix.values, config.K, config.SEED, config.MAX_ITER)
    else:
        assignment = analytics.dbscan(matrix.values, config.EPS, config.MIN_PTS)

    result = assignment.to_dict()
    result["labels"] = dict(zip(matrix.row_keys, result["labels"]))
    try:
        result["silhouette"] = analytics.silhouette_score(matrix.values, assignment.labels)
    except analytics.SingleCluster:
        result["silhouette"] = None
    return CommandResult(result)


def run_mine(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    db = build_transaction_db(chain.records)
    mine = frequent_itemsets_apriori if config.ALGORITHM == "apriori" else frequent_itemsets_eclat
    frequent = mine(db, config.MIN_SUPPORT)
    rules = generate_rules(frequent, len(db), config.MIN_CONFIDENCE)
    itemsets = sorted(
        ({"count": count, "items": sorted(items)} for items, count in frequent.items()),
        key=lambda d: (-d["count"], d["items"]),
    )
    return CommandResult(
        {
            "frequent_itemsets": itemsets,
            "rules": [rule.to_dict() for rule in rules],
            "transactions": len(db),
        }
    )


def run_forecast(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    series = analytics.daily_series(chain.records)
    horizon = series[-1][0] + config.HORIZON
    forecast = analytics.linear_forecast(series, horizon)
    return CommandResult({"forecast": forecast.to_dict(), "points": len(series)})


# ============================================================================
# AUDIT COMMANDS
# ============================================================================


def run_audit(config: RunConfig) -> CommandResult:
    chains = _party_chains(config)
    predicate = parse_predicate(config.PREDICATE, config.LIMIT, config.MIN_RATIO)
    transcript = run_compliance_audit(chains, predicate, seed=config.SEED)
    linkage = private_record_linkage(chains, seed=config.SEED)

    if config.OUT_PATH is not None:
        config.OUT_PATH.write_text(
            json.dumps(transcript.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    result = {
        "linkage": {"linked_count": linkage.linked_count, "party_counts": linkage.party_counts},
        "transcript": transcript.to_dict(),
        "transcript_hash": transcript.transcript_hash,
        "verdict": transcript.verdict,
    }
    return CommandResult(result, exit_code=0 if transcript.verdict == "pass" else 1)


def run_attest(config: RunConfig) -> CommandResult:
    chain = _single_chain(config)
    try:
        data = json.loads(config.TRANSCRIPT_PATH.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read transcript {config.TRANSCRIPT_PATH}: {e}") from e
    transcript = AuditTranscript.from_dict(data)

    chain = emit_attestation(transcript, chain, config.RECORDED_AT)
    save_chain(chain, config.OUT_PATH)
    verification = verify_chain(chain)
    return CommandResult(
        {
            "attestation": find_attestation(chain, transcript.session_id).to_dict(),
            "chain": _chain_summary(chain),
            "chain_ok": verification.ok,
            "verdict": transcript.verdict,
            "verified": verify_attestation(chain, transcript),
        },
        exit_code=0 if verification.ok else 1,
    )


HANDLERS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "init": run_init,
    "record": run_record,
    "verify": run_verify,
    "ingest": run_ingest,
    "reconcile": run_reconcile,
    "encode": run_encode,
    "train": run_train,
    "detect": run_detect,
    "cluster": run_cluster,
    "mine": run_mine,
    "forecast": run_forecast,
    "audit-mpc": run_audit,
    "attest": run_attest,
}
