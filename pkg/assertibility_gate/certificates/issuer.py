from typing import Optional, Sequence, Tuple

from ..decision.forcing import witness_check
from ..decision.models import ForcingWitness
from ..helpers.errors import UnresolvedRecordRef, WitnessRejected
from ..helpers.logger import setup_logger
from ..records.store import RecordStore
from .models import (
    CertificateToken,
    CertProvenance,
    CertScope,
    CertType,
    Claim,
    DeploymentContract,
    replay_seed_for,
)

logger = setup_logger(name=__name__)


def issue_certificate(
    contract: DeploymentContract,
    claim: Claim,
    witness: ForcingWitness,
    record_refs: Sequence[str],
    scope: CertScope,
    record_store: Optional[RecordStore] = None,
) -> CertificateToken:
    """
    Package a witness and its context into a sealed certificate token.

    The token is ``mixed`` when it references record items, ``formal`` otherwise.

    :param contract: (DeploymentContract) Contract the claim is made under
    :param claim: (Claim) Predicate and the categorical status claimed
    :param witness: (ForcingWitness) Must entail ``claim.status``
    :param record_refs: (list) Item hashes of the public-record items relied on
    :param scope: (CertScope) Jurisdiction, window and identity rule claimed
    :param record_store: (RecordStore) Store the refs must resolve in as of the record time
    :return: (CertificateToken)
    """
    if not witness_check(witness, claim.to_predicate(), claim.status):
        logger.error(f"Witness for {claim.query_id} does not entail {claim.status.value}")
        raise WitnessRejected(f"Witness does not entail status {claim.status.value} for {claim.query_id}")

    refs = _resolved_refs(contract, record_refs, record_store)
    return _sealed_token(contract, CertType.MIXED if refs else CertType.FORMAL, claim, witness, refs, scope)


def issue_record_certificate(
    contract: DeploymentContract,
    query_id: str,
    statement: str,
    record_refs: Sequence[str],
    scope: CertScope,
    record_store: RecordStore,
) -> CertificateToken:
    """
    Issue an institutional token for a record-only claim.

    The token carries no numeric witness. Its standing comes from the referenced
    items, which the checker holds to the standing policy.

    :param contract: (DeploymentContract) Contract the claim is made under
    :param query_id: (str) Identifier of the claim
    :param statement: (str) What the referenced items attest, e.g. "report R contains e"
    :param record_refs: (list) Item hashes of the records the claim rests on; at least one
    :param scope: (CertScope) Jurisdiction, window and identity rule claimed
    :param record_store: (RecordStore) Store the refs must resolve in as of the record time
    :return: (CertificateToken)
    """
    refs = _resolved_refs(contract, record_refs, record_store)
    if not refs:
        logger.error(f"Record claim {query_id} references no record items")
        raise UnresolvedRecordRef(f"Record claim {query_id} needs at least one record ref")
    claim = Claim.for_record(query_id, statement)
    return _sealed_token(contract, CertType.INSTITUTIONAL, claim, None, refs, scope)


def _resolved_refs(
    contract: DeploymentContract,
    record_refs: Sequence[str],
    record_store: Optional[RecordStore],
) -> Tuple[str, ...]:
    refs = tuple(record_refs)
    for ref in refs:
        if record_store is None or record_store.resolve(ref, contract.record_time) is None:
            logger.error(f"Record ref {ref} does not resolve as of {contract.record_time.isoformat()}")
            raise UnresolvedRecordRef(f"Record ref {ref} does not resolve at the contract record time")
    return refs


def _sealed_token(
    contract: DeploymentContract,
    cert_type: CertType,
    claim: Claim,
    witness: Optional[ForcingWitness],
    refs: Tuple[str, ...],
    scope: CertScope,
) -> CertificateToken:
    token = CertificateToken(
        cert_type=cert_type,
        claim=claim,
        witness=witness,
        assumptions=tuple(contract.assumptions()),
        scope=scope,
        record_time=contract.record_time,
        t_int=contract.t_int,
        provenance=CertProvenance(
            model_hash=contract.t_int.model_hash,
            verifier_version=contract.t_int.verifier_version,
            config_hash=contract.t_int.config_hash,
            record_item_hashes=refs,
            replay_seed=replay_seed_for(claim.query_id),
        ),
    ).resealed()
    logger.info(f"Issued {token.cert_type.value} certificate {token.cert_hash[:12]} for {claim.query_id}")

    return token
