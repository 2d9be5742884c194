"""
Certificate checking.

Checks run in a fixed order: completeness, integrity, witness, scope, provenance,
standing. A missing field stops the check; every later stage reports all of its
failures so a rejected token explains itself.

Institutional tokens carry a record claim and a null witness. For them the witness
stage only confirms the claim is a record claim; standing over the referenced items
does the work.
"""
from typing import Any, Dict, List, Optional, Union

from ..decision.forcing import witness_check
from ..decision.models import ForcingWitness, Predicate, Status, ThresholdPredicate
from ..helpers.canonical import canonical_hash, without_key
from ..helpers.errors import GateError
from ..helpers.logger import setup_logger
from ..helpers.utilities import parse_timestamp
from ..records.models import ScopePolicy, StandingPolicy
from ..records.policies import evaluate_standing
from ..records.store import RecordStore
from .models import (
    MANDATORY_FIELDS,
    CertificateToken,
    CertProvenance,
    CertScope,
    CertType,
    CheckFailure,
    CheckResult,
    Claim,
    ConfigReference,
    DeploymentContract,
    FailureCode,
    Forcing,
    parse_witness,
    replay_seed_for,
)

logger = setup_logger(name=__name__)

NESTED_MANDATORY_FIELDS = {
    "provenance": ("model_hash", "verifier_version", "config_hash", "record_item_hashes", "replay_seed"),
    "scope": ("jurisdiction", "time_window", "identity_rule_id"),
    "t_int": ("timestamp", "model_hash", "verifier_version", "config_hash"),
}

# Which failure code a malformed (present but unparsable) field reports.
_PART_PARSERS: Dict[str, tuple] = {
    "claim": (Claim.from_dict, FailureCode.WITNESS_INVALID),
    "witness": (parse_witness, FailureCode.WITNESS_INVALID),
    "scope": (CertScope.from_dict, FailureCode.SCOPE_MISMATCH),
    "record_time": (parse_timestamp, FailureCode.SCOPE_MISMATCH),
    "t_int": (ConfigReference.from_dict, FailureCode.PROVENANCE_FAIL),
    "provenance": (CertProvenance.from_dict, FailureCode.PROVENANCE_FAIL),
    "cert_type": (CertType, FailureCode.FIELD_MISSING),
}


def _missing_fields(document: Any) -> List[CheckFailure]:
    if not isinstance(document, dict):
        return [CheckFailure("certificate", FailureCode.FIELD_MISSING)]
    required = [name for name in MANDATORY_FIELDS if name != "witness"]
    if document.get("cert_type") != CertType.INSTITUTIONAL.value:
        required.append("witness")
    failures = [CheckFailure(name, FailureCode.FIELD_MISSING) for name in required if document.get(name) is None]
    if "witness" not in document:
        failures.append(CheckFailure("witness", FailureCode.FIELD_MISSING))
    for name, keys in NESTED_MANDATORY_FIELDS.items():
        part = document.get(name)
        if isinstance(part, dict):
            failures.extend(
                CheckFailure(f"{name}.{key}", FailureCode.FIELD_MISSING) for key in keys if part.get(key) is None
            )
    return failures


def _integrity(document: dict, contract: DeploymentContract) -> List[CheckFailure]:
    failures = []
    if canonical_hash(without_key(document, "cert_hash")) != document["cert_hash"]:
        failures.append(CheckFailure("cert_hash", FailureCode.HASH_MISMATCH))
    if not contract.hash_is_valid:
        failures.append(CheckFailure("contract", FailureCode.HASH_MISMATCH))
    return failures


def _parse_parts(document: dict) -> tuple:
    parts, failures = {}, []
    for name, (parser, code) in _PART_PARSERS.items():
        try:
            parts[name] = parser(document[name])
        except (GateError, TypeError, ValueError) as e:
            logger.debug(f"Certificate field {name} is malformed: {e}")
            failures.append(CheckFailure(name, code))
    assumptions = document["assumptions"]
    if isinstance(assumptions, list) and all(isinstance(a, str) for a in assumptions):
        parts["assumptions"] = tuple(assumptions)
    else:
        failures.append(CheckFailure("assumptions", FailureCode.SCOPE_MISMATCH))
    return parts, failures


def _claim_matches_contract(claim: Claim, contract: DeploymentContract) -> bool:
    if claim.predicate == ThresholdPredicate.kind:
        return claim.tau == contract.tau
    return True


def _record_claim_checks(claim: Optional[Claim], witness: Optional[ForcingWitness]) -> List[CheckFailure]:
    failures = []
    if claim is not None and not (claim.is_record_claim and claim.status is Status.ASSERTED):
        # Categorical numeric claims need a formal component.
        failures.append(CheckFailure("cert_type", FailureCode.WITNESS_INVALID))
    if witness is not None:
        failures.append(CheckFailure("witness", FailureCode.WITNESS_INVALID))
    return failures


def _witness_checks(parts: dict, contract: DeploymentContract) -> List[CheckFailure]:
    failures = []
    claim, witness, cert_type = parts.get("claim"), parts.get("witness"), parts.get("cert_type")
    if cert_type is CertType.INSTITUTIONAL:
        return _record_claim_checks(claim, witness)
    if claim is not None and claim.is_record_claim:
        # Record claims have no numeric witness to check.
        failures.append(CheckFailure("cert_type", FailureCode.WITNESS_INVALID))
    if claim is None or witness is None:
        return failures
    try:
        predicate = claim.to_predicate()
    except GateError:
        return failures + [CheckFailure("claim", FailureCode.WITNESS_INVALID)]
    if not claim.status.is_categorical or not _claim_matches_contract(claim, contract):
        failures.append(CheckFailure("claim", FailureCode.WITNESS_INVALID))
    if witness.stage > contract.n_max:
        failures.append(CheckFailure("witness", FailureCode.WITNESS_INVALID))
    if not witness_check(witness, predicate, claim.status):
        failures.append(CheckFailure("witness", FailureCode.WITNESS_INVALID))
    return failures


def _scope_checks(parts: dict, contract: DeploymentContract, scope_policy: ScopePolicy) -> List[CheckFailure]:
    failures = []
    scope = parts.get("scope")
    if scope is not None:
        start, end = scope.time_window
        admissible = (
            contract.scope_policy_id == scope_policy.policy_id
            and scope.jurisdiction in scope_policy.jurisdictions
            and start <= end
            and scope_policy.covers(start)
            and scope_policy.covers(end)
            and scope.identity_rule_id == scope_policy.identity_rule_id
        )
        if not admissible:
            failures.append(CheckFailure("scope", FailureCode.SCOPE_MISMATCH))
    record_time = parts.get("record_time")
    if record_time is not None and record_time != contract.record_time:
        failures.append(CheckFailure("record_time", FailureCode.SCOPE_MISMATCH))
    assumptions = parts.get("assumptions")
    if assumptions is not None and list(assumptions) != contract.assumptions():
        failures.append(CheckFailure("assumptions", FailureCode.SCOPE_MISMATCH))
    return failures


def _provenance_checks(
    parts: dict,
    contract: DeploymentContract,
    record_store: Optional[RecordStore],
) -> List[CheckFailure]:
    failures = []
    t_int = parts.get("t_int")
    if t_int is not None and t_int != contract.t_int:
        failures.append(CheckFailure("t_int", FailureCode.PROVENANCE_FAIL))
    provenance, claim = parts.get("provenance"), parts.get("claim")
    if provenance is None:
        return failures
    pinned = (
        provenance.model_hash == contract.t_int.model_hash
        and provenance.verifier_version == contract.t_int.verifier_version
        and provenance.config_hash == contract.t_int.config_hash
        and contract.t_int.config_hash == contract.expected_config_hash
    )
    resolved = all(
        record_store is not None and record_store.resolve(ref, contract.record_time) is not None
        for ref in provenance.record_item_hashes
    )
    seeded = claim is None or provenance.replay_seed == replay_seed_for(claim.query_id)
    if not (pinned and resolved and seeded):
        failures.append(CheckFailure("provenance", FailureCode.PROVENANCE_FAIL))
    return failures


def _standing_checks(
    parts: dict,
    contract: DeploymentContract,
    record_store: Optional[RecordStore],
    standing_policy: StandingPolicy,
) -> List[CheckFailure]:
    failures = []
    if contract.standing_policy_id != standing_policy.policy_id:
        failures.append(CheckFailure("standing", FailureCode.STANDING_FAIL))
    cert_type, provenance = parts.get("cert_type"), parts.get("provenance")
    if cert_type is None or provenance is None:
        return failures
    refs = provenance.record_item_hashes
    if cert_type is CertType.FORMAL:
        if refs:
            failures.append(CheckFailure("cert_type", FailureCode.STANDING_FAIL))
        return failures
    if not refs:
        failures.append(CheckFailure("cert_type", FailureCode.STANDING_FAIL))
        return failures
    items = []
    if record_store is not None:
        items = [record_store.resolve(ref, contract.record_time) for ref in refs]
    standing = evaluate_standing(standing_policy, [item for item in items if item is not None])
    if not standing.passed:
        failures.append(CheckFailure("standing", FailureCode.STANDING_FAIL))
    return failures


def check_certificate(
    contract: DeploymentContract,
    token: Union[CertificateToken, dict],
    record_store: Optional[RecordStore],
    scope_policy: ScopePolicy,
    standing_policy: StandingPolicy,
) -> CheckResult:
    """
    Verify a certificate token against a contract, the public record and the policies.

    :param contract: (DeploymentContract)
    :param token: (CertificateToken or dict) A token or its parsed ``.cert.json`` document
    :param record_store: (RecordStore) Store that record refs must resolve in
    :param scope_policy: (ScopePolicy)
    :param standing_policy: (StandingPolicy)
    :return: (CheckResult) accepted, plus one {field, code} entry per failed check
    """
    document = token.to_dict() if isinstance(token, CertificateToken) else token
    missing = _missing_fields(document)
    if missing:
        logger.info(f"Certificate rejected: missing {[f.field for f in missing]}")
        return CheckResult.from_failures(missing)

    failures = _integrity(document, contract)
    parts, parse_failures = _parse_parts(document)
    failures.extend(parse_failures)
    failures.extend(_witness_checks(parts, contract))
    failures.extend(_scope_checks(parts, contract, scope_policy))
    failures.extend(_provenance_checks(parts, contract, record_store))
    failures.extend(_standing_checks(parts, contract, record_store, standing_policy))

    result = CheckResult.from_failures(failures)
    if result.accepted:
        logger.debug(f"Certificate {document['cert_hash'][:12]} accepted")
    else:
        logger.info(f"Certificate rejected: {[f.to_dict() for f in result.failures]}")

    return result


def adequacy(
    contract: DeploymentContract,
    token: Union[CertificateToken, dict],
    record_store: Optional[RecordStore],
    scope_policy: ScopePolicy,
    standing_policy: StandingPolicy,
) -> bool:
    """True when the token passes every check under this contract, scope and record."""
    return check_certificate(contract, token, record_store, scope_policy, standing_policy).accepted


def forces(token: CertificateToken, predicate: Predicate) -> Forcing:
    """
    Which side of ``predicate`` the token's witness forces.

    Only the claim's own status is considered; a witness that would entail the
    opposite of what the token claims forces neither.
    """
    if token.claim.status is Status.UNDETERMINED or token.witness is None:
        return Forcing.NEITHER
    if not witness_check(token.witness, predicate, token.claim.status):
        return Forcing.NEITHER
    return Forcing.ASSERTS if token.claim.status is Status.ASSERTED else Forcing.DENIES


class CertificateChecker(object):
    """
    A checker bound to one contract, record store and policy pair.

    Instances are callable with a token and are what the interface gate consults.
    """

    def __init__(
        self,
        contract: DeploymentContract,
        record_store: Optional[RecordStore],
        scope_policy: ScopePolicy,
        standing_policy: StandingPolicy,
    ):
        self.contract = contract
        self.record_store = record_store
        self.scope_policy = scope_policy
        self.standing_policy = standing_policy

    def __call__(self, token: Union[CertificateToken, dict]) -> CheckResult:
        return self.check(token)

    def check(self, token: Union[CertificateToken, dict]) -> CheckResult:
        return check_certificate(self.contract, token, self.record_store, self.scope_policy, self.standing_policy)

    def adequate(self, token: Union[CertificateToken, dict]) -> bool:
        return self.check(token).accepted

    def with_contract(self, contract: DeploymentContract) -> "CertificateChecker":
        return CertificateChecker(contract, self.record_store, self.scope_policy, self.standing_policy)

    def with_record_store(self, record_store: RecordStore) -> "CertificateChecker":
        return CertificateChecker(self.contract, record_store, self.scope_policy, self.standing_policy)

