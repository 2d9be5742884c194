from collections import Counter
from pathlib import Path
from typing import Iterable, Tuple, Union

from ..helpers.errors import ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import read_json
from .models import (
    QueryMeta,
    RecordItem,
    ScopeFailure,
    ScopePolicy,
    ScopeResult,
    StandingPolicy,
    StandingResult,
)

logger = setup_logger(name=__name__)


def evaluate_scope(policy: ScopePolicy, query_meta: QueryMeta) -> ScopeResult:
    """
    Check a query against the admissible scope, reporting the first failing condition.

    :param policy: (ScopePolicy)
    :param query_meta: (QueryMeta) jurisdiction, query_time, identity_rule_id
    :return: (ScopeResult)
    """
    if query_meta.jurisdiction not in policy.jurisdictions:
        result = ScopeResult(False, ScopeFailure.JURISDICTION)
    elif not policy.covers(query_meta.query_time):
        result = ScopeResult(False, ScopeFailure.TIME_WINDOW)
    elif query_meta.identity_rule_id != policy.identity_rule_id:
        result = ScopeResult(False, ScopeFailure.IDENTITY_RULE)
    else:
        result = ScopeResult(True)
    logger.debug(f"Scope {policy.policy_id}: {result}")

    return result


def evaluate_standing(policy: StandingPolicy, items: Iterable[RecordItem]) -> StandingResult:
    """
    Check the as-of record slice against the evidential standard.

    :param policy: (StandingPolicy)
    :param items: (list) RecordItem objects as of the record time
    :return: (StandingResult) with per-class shortfalls on failure
    """
    counts = Counter(
        item.evidence_class for item in items if item.authenticated or not policy.require_authenticated
    )
    missing = {
        evidence_class: minimum - counts[evidence_class]
        for evidence_class, minimum in sorted(policy.required_classes.items())
        if counts[evidence_class] < minimum
    }
    result = StandingResult(not missing, missing)
    logger.debug(f"Standing {policy.policy_id}: {result}")

    return result


def load_policies(path: Union[str, Path]) -> Tuple[ScopePolicy, StandingPolicy]:
    """
    Read a ``.policy.json`` file holding ``{"scope": {...}, "standing": {...}}``.
    """
    document = read_json(path)
    if not isinstance(document, dict) or "scope" not in document or "standing" not in document:
        raise ParseError(f"Policy file {path} needs 'scope' and 'standing' sections")
    return ScopePolicy.from_dict(document["scope"]), StandingPolicy.from_dict(document["standing"])
