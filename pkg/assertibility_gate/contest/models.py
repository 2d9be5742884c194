from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Optional, Tuple

from ..certificates.models import CheckResult, FailureCode
from ..helpers.canonical import canonical_dumps, canonical_hash, without_key
from ..helpers.errors import ParseError
from ..helpers.utilities import format_timestamp, parse_timestamp

GENESIS_HASH = "0" * 64


class ChallengerRole(str, Enum):
    AFFECTED_PARTY = "affected_party"
    AUDITOR = "auditor"


class ChallengeGround(str, Enum):
    WITNESS_VALIDITY = "witness_validity"
    SCOPE_APPLICABILITY = "scope_applicability"
    PROVENANCE_DEFECT = "provenance_defect"

    @property
    def failure_codes(self) -> frozenset:
        """Check failures that uphold a challenge on this ground."""
        return _GROUND_CODES[self]


_GROUND_CODES = {
    ChallengeGround.WITNESS_VALIDITY: frozenset({FailureCode.WITNESS_INVALID}),
    ChallengeGround.SCOPE_APPLICABILITY: frozenset({FailureCode.SCOPE_MISMATCH, FailureCode.STANDING_FAIL}),
    ChallengeGround.PROVENANCE_DEFECT: frozenset(
        {FailureCode.PROVENANCE_FAIL, FailureCode.HASH_MISMATCH, FailureCode.FIELD_MISSING}
    ),
}


@dataclass(frozen=True)
class Challenge(object):
    challenge_id: str
    challenger_role: str
    target_cert_hash: str
    ground: ChallengeGround
    submitted_at: datetime
    payload: Tuple[str, ...] = ()

    def __post_init__(self):
        try:
            object.__setattr__(self, "ground", ChallengeGround(self.ground))
        except ValueError:
            raise ParseError(f"Unknown challenge ground {self.ground!r}")
        object.__setattr__(self, "submitted_at", parse_timestamp(self.submitted_at))
        object.__setattr__(self, "payload", tuple(self.payload))

    def to_dict(self) -> dict:
        return {
            "challenge_id": self.challenge_id,
            "challenger_role": self.challenger_role,
            "target_cert_hash": self.target_cert_hash,
            "ground": self.ground.value,
            "submitted_at": format_timestamp(self.submitted_at),
            "payload": list(self.payload),
        }

    @classmethod
    def from_dict(cls, document: dict) -> "Challenge":
        try:
            return cls(
                challenge_id=document["challenge_id"],
                challenger_role=document["challenger_role"],
                target_cert_hash=document["target_cert_hash"],
                ground=document["ground"],
                submitted_at=document["submitted_at"],
                payload=tuple(document.get("payload", ())),
            )
        except (KeyError, TypeError) as e:
            raise ParseError(f"Malformed challenge: {e}")


class HistoryEvent(str, Enum):
    ISSUED = "ISSUED"
    CHALLENGED = "CHALLENGED"
    UPHELD = "UPHELD"
    DISMISSED = "DISMISSED"
    REVISED = "REVISED"


@dataclass(frozen=True)
class HistoryEntry(object):
    """One link of the entitlement history; ``entry_hash`` covers every other field."""

    seq: int
    event: HistoryEvent
    query_id: str
    prev_entry_hash: str
    cert_hash: Optional[str] = None
    new_status: Optional[str] = None
    detail: dict = field(default_factory=dict)
    entry_hash: str = ""

    def __post_init__(self):
        object.__setattr__(self, "event", HistoryEvent(self.event))

    @classmethod
    def sealed(cls, **fields) -> "HistoryEntry":
        entry = cls(**fields)
        object.__setattr__(entry, "entry_hash", canonical_hash(entry.hash_payload()))
        return entry

    def hash_payload(self) -> dict:
        return without_key(self.to_dict(), "entry_hash")

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "event": self.event.value,
            "query_id": self.query_id,
            "cert_hash": self.cert_hash,
            "new_status": self.new_status,
            "detail": self.detail,
            "prev_entry_hash": self.prev_entry_hash,
            "entry_hash": self.entry_hash,
        }

    def line(self) -> str:
        return canonical_dumps(self.to_dict())

    @classmethod
    def from_dict(cls, document: dict) -> "HistoryEntry":
        try:
            return cls(
                seq=document["seq"],
                event=document["event"],
                query_id=document["query_id"],
                prev_entry_hash=document["prev_entry_hash"],
                cert_hash=document.get("cert_hash"),
                new_status=document.get("new_status"),
                detail=document.get("detail") or {},
                entry_hash=document["entry_hash"],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Malformed history entry: {e}")


@dataclass(frozen=True)
class Acknowledgment(object):
    challenge_id: str
    seq: int


@dataclass(frozen=True)
class RecheckOutcome(object):
    challenge_id: str
    query_id: str
    cert_hash: str
    ground: ChallengeGround
    upheld: bool
    check_result: CheckResult

    @property
    def decisive_codes(self) -> Tuple[FailureCode, ...]:
        """Failure codes on the challenged ground, in check order."""
        return tuple(code for code in dict.fromkeys(self.check_result.codes) if code in self.ground.failure_codes)

    def to_dict(self) -> dict:
        return {
            "challenge_id": self.challenge_id,
            "ground": self.ground.value,
            "outcome": "upheld" if self.upheld else "dismissed",
            "check": self.check_result.to_dict(),
        }


@dataclass(frozen=True)
class ReplayResult(object):
    valid: bool
    bad_seq: Optional[int] = None
    reason: str = ""
