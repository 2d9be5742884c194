from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Union

from ..certificates.models import CertificateToken, DeploymentContract
from ..decision.models import Predicate, Status, predicate_from_dict
from ..helpers.canonical import canonical_hash
from ..helpers.errors import GateError, ParseError
from ..helpers.utilities import format_timestamp, parse_timestamp, read_json
from ..intervals import Interval
from ..network.propagation import EnclosureVector
from ..records.models import FeatureSpec, QueryMeta


class ReasonClass(str, Enum):
    U_EVIDENCE = "U-EVIDENCE"
    U_SCOPE = "U-SCOPE"
    U_MODEL = "U-MODEL"
    U_COMPUTE = "U-COMPUTE"


@dataclass(frozen=True)
class Query(object):
    """A warrant-claim query: where and when it is asked, and which model-claim backs it."""

    query_id: str
    query_meta: QueryMeta
    predicate: dict
    feature_spec: FeatureSpec
    claim_text: str = ""

    def predicate_for(self, contract: DeploymentContract) -> Predicate:
        """Threshold predicates take tau from the contract."""
        return predicate_from_dict(self.predicate, tau=contract.tau)

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "query_meta": self.query_meta.to_dict(),
            "predicate": dict(self.predicate),
            "feature_spec": self.feature_spec.to_dict(),
            "claim_text": self.claim_text,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "Query":
        if not isinstance(document, dict):
            raise ParseError(f"Query must be an object, got {document!r}")
        missing = [k for k in ("query_id", "query_meta", "predicate", "feature_spec") if k not in document]
        if missing:
            raise ParseError(f"Query is missing {', '.join(missing)}")
        if not isinstance(document["predicate"], dict):
            raise ParseError("Query predicate must be an object")
        return cls(
            query_id=str(document["query_id"]),
            query_meta=QueryMeta.from_dict(document["query_meta"]),
            predicate=dict(document["predicate"]),
            feature_spec=FeatureSpec.from_dict(document["feature_spec"]),
            claim_text=str(document.get("claim_text", "")),
        )


def load_query(path: Union[str, Path]) -> Query:
    return Query.from_dict(read_json(path))


@dataclass(frozen=True)
class UndeterminedDetail(object):
    """What an Undetermined verdict reports about why nothing was forced."""

    failed_checks: Tuple[str, ...] = ()
    last_bounds: Optional[Interval] = None
    last_enclosure: Optional[EnclosureVector] = None
    stages_used: int = 0
    cost_spent: int = 0
    exhausted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "failed_checks", tuple(self.failed_checks))

    def to_dict(self) -> dict:
        return {
            "failed_checks": list(self.failed_checks),
            "last_bounds": self.last_bounds.to_dict() if self.last_bounds is not None else None,
            "last_enclosure": self.last_enclosure.to_dict() if self.last_enclosure is not None else None,
            "stages_used": self.stages_used,
            "cost_spent": self.cost_spent,
            "exhausted": self.exhausted,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "UndeterminedDetail":
        bounds, enclosure = document.get("last_bounds"), document.get("last_enclosure")
        return cls(
            failed_checks=tuple(document.get("failed_checks", ())),
            last_bounds=Interval.from_dict(bounds) if bounds is not None else None,
            last_enclosure=EnclosureVector.from_dict(enclosure) if enclosure is not None else None,
            stages_used=int(document.get("stages_used", 0)),
            cost_spent=int(document.get("cost_spent", 0)),
            exhausted=bool(document.get("exhausted", False)),
        )


@dataclass(frozen=True)
class InterfaceOutput(object):
    """
    The gate's answer to one query: a status plus its trace.

    A and D carry at least one certificate and no reason; U carries exactly one
    reason class, its detail, and no certificate.
    """

    query_id: str
    status: Status
    contract_hash: str
    record_time: datetime
    certificates: Tuple[CertificateToken, ...] = ()
    reason: Optional[ReasonClass] = None
    detail: Optional[UndeterminedDetail] = None
    supersedes: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        object.__setattr__(self, "record_time", parse_timestamp(self.record_time))
        object.__setattr__(self, "certificates", tuple(self.certificates))
        if self.reason is not None:
            object.__setattr__(self, "reason", ReasonClass(self.reason))
        if self.status.is_categorical:
            if not self.certificates or self.reason is not None:
                raise GateError(f"{self.status.value} output for {self.query_id} needs certificates and no reason")
        elif self.certificates or self.reason is None:
            raise GateError(f"U output for {self.query_id} needs a reason and no certificates")

    @property
    def trace(self) -> dict:
        if self.status.is_categorical:
            return {"certificates": [token.to_dict() for token in self.certificates]}
        detail = self.detail if self.detail is not None else UndeterminedDetail()
        return {"reason": self.reason.value, "detail": detail.to_dict()}

    @property
    def output_hash(self) -> str:
        return canonical_hash(self.to_dict())

    def to_dict(self) -> dict:
        document = {
            "query_id": self.query_id,
            "status": self.status.value,
            "contract_hash": self.contract_hash,
            "record_time": format_timestamp(self.record_time),
            "trace": self.trace,
        }
        if self.supersedes is not None:
            document["supersedes"] = self.supersedes
        return document

    @classmethod
    def from_dict(cls, document: dict) -> "InterfaceOutput":
        try:
            trace = document["trace"]
            detail = trace.get("detail")
            return cls(
                query_id=document["query_id"],
                status=document["status"],
                contract_hash=document["contract_hash"],
                record_time=document["record_time"],
                certificates=tuple(CertificateToken.from_dict(t) for t in trace.get("certificates", ())),
                reason=trace.get("reason"),
                detail=UndeterminedDetail.from_dict(detail) if detail is not None else None,
                supersedes=document.get("supersedes"),
            )
        except (KeyError, AttributeError, TypeError) as e:
            raise ParseError(f"Malformed verdict document: {e}")
