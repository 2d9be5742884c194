"""
Entitlement history: an append-only, hash-chained log of issuance, challenge,
re-check and revision events.

Each entry's ``entry_hash`` is the digest of its canonical form without that
field, and ``prev_entry_hash`` links to the previous entry (a zero digest for
the first). Replay recomputes the chain and also requires every stored line to
be byte-identical to the canonical serialization of what it parses to.
"""
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from ..certificates.checker import CertificateChecker
from ..certificates.models import DEFAULT_CHALLENGE_ROLES, CertificateToken, DeploymentContract, FailureCode
from ..decision.models import Status
from ..gate.models import InterfaceOutput, ReasonClass, UndeterminedDetail
from ..helpers.canonical import canonical_dumps, canonical_hash, without_key
from ..helpers.errors import (
    GateError,
    NoUpheldChallenge,
    ParseError,
    UnauthorizedChallenger,
    UnknownCertificate,
)
from ..helpers.logger import setup_logger
from ..records.models import ScopePolicy, StandingPolicy
from ..records.store import RecordStore
from .models import (
    GENESIS_HASH,
    Acknowledgment,
    Challenge,
    HistoryEntry,
    HistoryEvent,
    RecheckOutcome,
    ReplayResult,
)

logger = setup_logger(name=__name__)

REVISION_REASONS = {
    FailureCode.SCOPE_MISMATCH: ReasonClass.U_SCOPE,
    FailureCode.PROVENANCE_FAIL: ReasonClass.U_EVIDENCE,
    FailureCode.STANDING_FAIL: ReasonClass.U_EVIDENCE,
    FailureCode.HASH_MISMATCH: ReasonClass.U_EVIDENCE,
    FailureCode.FIELD_MISSING: ReasonClass.U_EVIDENCE,
    FailureCode.WITNESS_INVALID: ReasonClass.U_MODEL,
}


class EntitlementHistory(object):
    """
    Hash-chained entitlement history with the challenge route on top of it.

    The current verdict per query and the issued certificates are rebuilt from
    entry details, so a history loaded from disk can take further challenges.
    """

    def __init__(self, path: Union[str, Path, None] = None):
        """
        :param path: (str or Path) Optional JSON-lines file each new entry is appended to
        """
        self.path = Path(path) if path is not None else None
        self._entries: List[HistoryEntry] = []
        self._outputs: Dict[str, InterfaceOutput] = {}
        self._certificates: Dict[str, CertificateToken] = {}
        self._challenges: Dict[str, Challenge] = {}
        self._upheld: Dict[str, str] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def entries(self) -> tuple:
        return tuple(self._entries)

    @property
    def head_hash(self) -> str:
        return self._entries[-1].entry_hash if self._entries else GENESIS_HASH

    def _apply(self, entry: HistoryEntry):
        detail = entry.detail
        if entry.event in (HistoryEvent.ISSUED, HistoryEvent.REVISED):
            output = InterfaceOutput.from_dict(detail["output"])
            self._outputs[entry.query_id] = output
            for token in output.certificates:
                self._certificates[token.cert_hash] = token
        elif entry.event is HistoryEvent.CHALLENGED:
            challenge = Challenge.from_dict(detail["challenge"])
            self._challenges[challenge.challenge_id] = challenge
        elif entry.event is HistoryEvent.UPHELD:
            self._upheld[detail["challenge_id"]] = entry.query_id

    def _append(
        self,
        event: HistoryEvent,
        query_id: str,
        cert_hash: Optional[str] = None,
        new_status: Optional[str] = None,
        detail: Optional[dict] = None,
    ) -> HistoryEntry:
        entry = HistoryEntry.sealed(
            seq=len(self._entries),
            event=event,
            query_id=query_id,
            prev_entry_hash=self.head_hash,
            cert_hash=cert_hash,
            new_status=new_status,
            detail=json.loads(canonical_dumps(detail or {})),
        )
        self._entries.append(entry)
        self._apply(entry)
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8", newline="\n") as f:
                f.write(entry.line() + "\n")
        logger.debug(f"History #{entry.seq} {event.value} {query_id}")

        return entry

    def record_issuance(self, output: InterfaceOutput) -> List[HistoryEntry]:
        """ISSUED entries for a verdict: one per certificate, or a single one for U."""
        detail = {"output": output.to_dict()}
        if not output.certificates:
            return [self._append(HistoryEvent.ISSUED, output.query_id, None, output.status.value, detail)]
        return [
            self._append(HistoryEvent.ISSUED, output.query_id, token.cert_hash, output.status.value, detail)
            for token in output.certificates
        ]

    def certificate(self, cert_hash: str) -> CertificateToken:
        token = self._certificates.get(cert_hash)
        if token is None:
            logger.error(f"No issued certificate {cert_hash}")
            raise UnknownCertificate(f"No issued certificate with hash {cert_hash}")
        return token

    def query_for(self, cert_hash: str) -> str:
        token = self.certificate(cert_hash)
        return token.claim.query_id

    def submit_challenge(
        self,
        challenge: Challenge,
        challenge_roles: Sequence[str] = DEFAULT_CHALLENGE_ROLES,
    ) -> Acknowledgment:
        """
        Accept a challenge from an authorized role against an issued certificate.

        :param challenge: (Challenge)
        :param challenge_roles: (list) Roles the contract authorizes
        :return: (Acknowledgment) challenge id and the CHALLENGED entry's seq
        """
        if challenge.challenger_role not in challenge_roles:
            logger.error(f"Role {challenge.challenger_role!r} may not challenge")
            raise UnauthorizedChallenger(
                f"Role {challenge.challenger_role!r} is not one of {sorted(challenge_roles)}"
            )
        if challenge.challenge_id in self._challenges:
            raise GateError(f"Challenge {challenge.challenge_id!r} was already submitted")
        query_id = self.query_for(challenge.target_cert_hash)
        entry = self._append(
            HistoryEvent.CHALLENGED,
            query_id,
            challenge.target_cert_hash,
            None,
            {"challenge": challenge.to_dict()},
        )
        logger.info(f"Challenge {challenge.challenge_id} on {challenge.ground.value} acknowledged at #{entry.seq}")

        return Acknowledgment(challenge.challenge_id, entry.seq)

    def recheck(self, challenge: Challenge, checker: CertificateChecker) -> RecheckOutcome:
        """
        Re-run the certificate check under the checker's contract and stores.

        Upheld iff a check on the challenged ground fails.
        """
        if challenge.challenge_id not in self._challenges:
            raise GateError(f"Challenge {challenge.challenge_id!r} has not been submitted")
        token = self.certificate(challenge.target_cert_hash)
        result = checker.check(token)
        upheld = any(code in challenge.ground.failure_codes for code in result.codes)
        outcome = RecheckOutcome(
            challenge_id=challenge.challenge_id,
            query_id=token.claim.query_id,
            cert_hash=token.cert_hash,
            ground=challenge.ground,
            upheld=upheld,
            check_result=result,
        )
        event = HistoryEvent.UPHELD if upheld else HistoryEvent.DISMISSED
        self._append(event, outcome.query_id, token.cert_hash, None, outcome.to_dict())
        if upheld:
            logger.warning(f"Challenge {challenge.challenge_id} upheld: {[c.value for c in outcome.decisive_codes]}")
        else:
            logger.info(f"Challenge {challenge.challenge_id} dismissed")

        return outcome

    def revise_status(self, query_id: str, outcome: RecheckOutcome) -> InterfaceOutput:
        """
        Supersede the current verdict for ``query_id`` with U after an upheld challenge.

        :return: (InterfaceOutput) The superseding verdict, linked to the old one
        """
        if not outcome.upheld or self._upheld.get(outcome.challenge_id) != query_id:
            logger.error(f"No upheld challenge {outcome.challenge_id} for {query_id}")
            raise NoUpheldChallenge(f"Challenge {outcome.challenge_id!r} was not upheld for {query_id!r}")
        current = self.current_status(query_id)
        codes = outcome.decisive_codes
        revised = InterfaceOutput(
            query_id=query_id,
            status=Status.UNDETERMINED,
            contract_hash=current.contract_hash,
            record_time=current.record_time,
            reason=REVISION_REASONS[codes[0]],
            detail=UndeterminedDetail(failed_checks=tuple(code.value for code in codes)),
            supersedes=current.output_hash,
        )
        self._append(
            HistoryEvent.REVISED,
            query_id,
            outcome.cert_hash,
            Status.UNDETERMINED.value,
            {"challenge_id": outcome.challenge_id, "supersedes": current.output_hash, "output": revised.to_dict()},
        )
        logger.info(f"{query_id}: {current.status.value} revised to U ({revised.reason.value})")

        return revised

    def current_status(self, query_id: str) -> InterfaceOutput:
        output = self._outputs.get(query_id)
        if output is None:
            raise GateError(f"No verdict recorded for query {query_id!r}")
        return output

    def entry(self, seq: int) -> HistoryEntry:
        return self._entries[seq]

    def output_at(self, seq: int) -> Optional[InterfaceOutput]:
        """The verdict an ISSUED or REVISED entry recorded; superseded verdicts stay retrievable."""
        document = self._entries[seq].detail.get("output")
        return InterfaceOutput.from_dict(document) if document is not None else None

    def lines(self) -> List[str]:
        return [entry.line() for entry in self._entries]

    def dumps(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.dumps().encode("utf-8"))
        return path

    def replay_verify(self) -> ReplayResult:
        return replay_verify_bytes(self.dumps().encode("utf-8"))

    @classmethod
    def load(cls, path: Union[str, Path], attach: bool = False) -> "EntitlementHistory":
        """
        Read and verify a history file.

        :param path: (str or Path)
        :param attach: (bool) Append later entries to the same file
        :raise ParseError: when the chain does not replay
        """
        data = Path(path).read_bytes()
        result = replay_verify_bytes(data)
        if not result.valid:
            logger.error(f"History {path} fails replay at seq {result.bad_seq}: {result.reason}")
            raise ParseError(f"History {path} fails replay at seq {result.bad_seq}: {result.reason}")
        history = cls()
        for raw in data.decode("utf-8").splitlines():
            entry = HistoryEntry.from_dict(json.loads(raw))
            history._entries.append(entry)
            history._apply(entry)
        if attach:
            history.path = Path(path)
        logger.info(f"Loaded {len(history)} history entries from {path}")

        return history


def _check_line(seq: int, raw: bytes, prev_hash: str) -> Optional[str]:
    try:
        text = raw.decode("utf-8")
        document = json.loads(text)
    except (UnicodeDecodeError, ValueError):
        return "line is not valid JSON"
    if not isinstance(document, dict):
        return "line is not an object"
    if canonical_dumps(document) != text:
        return "line is not in canonical form"
    if document.get("seq") != seq:
        return f"expected seq {seq}, found {document.get('seq')!r}"
    if document.get("prev_entry_hash") != prev_hash:
        return "prev_entry_hash does not link to the previous entry"
    if document.get("entry_hash") != canonical_hash(without_key(document, "entry_hash")):
        return "entry_hash does not match the entry"
    try:
        HistoryEvent(document.get("event"))
    except ValueError:
        return f"unknown event {document.get('event')!r}"
    return None


def replay_verify_bytes(data: bytes) -> ReplayResult:
    """
    Replay a serialized history.

    :param data: (bytes) JSON-lines content, newline-terminated
    :return: (ReplayResult) invalid at the first seq whose line fails
    """
    if not data:
        return ReplayResult(True)
    terminated = data.endswith(b"\n")
    lines = data.split(b"\n")
    if terminated:
        lines = lines[:-1]
    return _replay_lines(lines, terminated)


def _replay_lines(lines: Sequence[bytes], terminated: bool) -> ReplayResult:
    prev_hash = GENESIS_HASH
    for seq, raw in enumerate(lines):
        problem = _check_line(seq, raw, prev_hash)
        if problem is None and not terminated and seq == len(lines) - 1:
            problem = "last line is not newline-terminated"
        if problem is not None:
            return ReplayResult(False, seq, problem)
        prev_hash = json.loads(raw.decode("utf-8"))["entry_hash"]
    return ReplayResult(True)


def replay_verify(log: Union[EntitlementHistory, bytes, str, Path, Iterable[str]]) -> ReplayResult:
    """
    Recompute the hash chain of a history, a history file, or its lines.

    :param log: (EntitlementHistory, bytes, Path or list of str)
    :return: (ReplayResult) valid, or invalid with the first bad seq
    """
    if isinstance(log, EntitlementHistory):
        return log.replay_verify()
    if isinstance(log, bytes):
        return replay_verify_bytes(log)
    if isinstance(log, (str, Path)):
        return replay_verify_bytes(Path(log).read_bytes())
    return replay_verify_bytes("".join(line + "\n" for line in log).encode("utf-8"))


def submit_challenge(
    log: EntitlementHistory,
    challenge: Challenge,
    contract: Optional[DeploymentContract] = None,
) -> Acknowledgment:
    roles = contract.challenge_roles if contract is not None else DEFAULT_CHALLENGE_ROLES
    return log.submit_challenge(challenge, roles)


def recheck(
    contract: DeploymentContract,
    challenge: Challenge,
    log: EntitlementHistory,
    record_store: RecordStore,
    scope_policy: ScopePolicy,
    standing_policy: StandingPolicy,
) -> RecheckOutcome:
    """Contract-relative re-check: the same token can be upheld under one contract and dismissed under another."""
    return log.recheck(challenge, CertificateChecker(contract, record_store, scope_policy, standing_policy))


def revise_status(log: EntitlementHistory, query_id: str, outcome: RecheckOutcome) -> InterfaceOutput:
    return log.revise_status(query_id, outcome)
