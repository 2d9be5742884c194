from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from ..helpers.canonical import canonical_hash
from ..helpers.errors import ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_timestamp, parse_timestamp

logger = setup_logger(name=__name__)

DEFAULT_EVIDENCE_CLASSES = frozenset(
    [
        "press_report",
        "inquiry_report",
        "registry_entry",
        "sworn_testimony",
        "court_ruling",
    ]
)


def _require(document: Any, keys: Tuple[str, ...], what: str) -> dict:
    if not isinstance(document, dict):
        raise ParseError(f"{what} must be an object, got {document!r}")
    missing = [key for key in keys if key not in document]
    if missing:
        raise ParseError(f"{what} is missing {', '.join(missing)}")
    return document


@dataclass(frozen=True)
class ItemProvenance(object):
    source_id: str
    custody_chain: Tuple[str, ...] = ()
    authenticated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "custody_chain", tuple(self.custody_chain))

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "custody_chain": list(self.custody_chain),
            "authenticated": self.authenticated,
        }


@dataclass(frozen=True)
class RecordItem(object):
    """
    One public-record document, identified by its content hash.

    ``item_hash`` covers every field including the custody chain; certificates
    refer to items by it.
    """

    item_id: str
    content_hash: str
    evidence_class: str
    timestamp: datetime
    provenance: ItemProvenance

    def __post_init__(self):
        if not self.content_hash:
            raise ParseError(f"Record item {self.item_id!r} has an empty content_hash")
        object.__setattr__(self, "timestamp", parse_timestamp(self.timestamp))

    @property
    def authenticated(self) -> bool:
        return self.provenance.authenticated

    @property
    def item_hash(self) -> str:
        return canonical_hash(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "content_hash": self.content_hash,
            "evidence_class": self.evidence_class,
            "timestamp": format_timestamp(self.timestamp),
            "provenance": self.provenance.to_dict(),
        }

    @classmethod
    def from_dict(cls, document: dict) -> "RecordItem":
        _require(document, ("item_id", "content_hash", "evidence_class", "timestamp"), "Record item")
        provenance = document.get("provenance") or {}
        return cls(
            item_id=str(document["item_id"]),
            content_hash=str(document["content_hash"]),
            evidence_class=str(document["evidence_class"]),
            timestamp=document["timestamp"],
            provenance=ItemProvenance(
                source_id=str(provenance.get("source_id", "")),
                custody_chain=tuple(provenance.get("custody_chain", ())),
                authenticated=bool(provenance.get("authenticated", False)),
            ),
        )


@dataclass(frozen=True)
class StandingPolicy(object):
    """Evidential standard S: minimum counts per evidence class."""

    policy_id: str
    required_classes: Dict[str, int] = field(default_factory=dict)
    require_authenticated: bool = True

    def __post_init__(self):
        required = dict(self.required_classes)
        for evidence_class, count in required.items():
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise ParseError(f"Standing count for {evidence_class!r} must be a non-negative integer")
        object.__setattr__(self, "required_classes", required)

    def to_dict(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "required_classes": dict(self.required_classes),
            "require_authenticated": self.require_authenticated,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "StandingPolicy":
        _require(document, ("policy_id",), "Standing policy")
        return cls(
            policy_id=str(document["policy_id"]),
            required_classes=dict(document.get("required_classes", {})),
            require_authenticated=bool(document.get("require_authenticated", True)),
        )


@dataclass(frozen=True)
class ScopePolicy(object):
    """Admissible scope: jurisdictions, a time window, and an identity rule."""

    policy_id: str
    jurisdictions: frozenset
    time_window: Tuple[datetime, datetime]
    identity_rule_id: str

    def __post_init__(self):
        object.__setattr__(self, "jurisdictions", frozenset(self.jurisdictions))
        start, end = (parse_timestamp(t) for t in self.time_window)
        if start > end:
            raise ParseError(f"Scope policy {self.policy_id!r} window starts after it ends")
        object.__setattr__(self, "time_window", (start, end))

    def covers(self, when: datetime) -> bool:
        return self.time_window[0] <= parse_timestamp(when) <= self.time_window[1]

    def to_dict(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "jurisdictions": sorted(self.jurisdictions),
            "time_window": [format_timestamp(t) for t in self.time_window],
            "identity_rule_id": self.identity_rule_id,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "ScopePolicy":
        _require(document, ("policy_id", "jurisdictions", "time_window", "identity_rule_id"), "Scope policy")
        window = document["time_window"]
        if not isinstance(window, (list, tuple)) or len(window) != 2:
            raise ParseError("Scope policy time_window must be [start, end]")
        return cls(
            policy_id=str(document["policy_id"]),
            jurisdictions=frozenset(document["jurisdictions"]),
            time_window=(window[0], window[1]),
            identity_rule_id=str(document["identity_rule_id"]),
        )


@dataclass(frozen=True)
class QueryMeta(object):
    jurisdiction: str
    query_time: datetime
    identity_rule_id: str

    def __post_init__(self):
        object.__setattr__(self, "query_time", parse_timestamp(self.query_time))

    def to_dict(self) -> dict:
        return {
            "jurisdiction": self.jurisdiction,
            "query_time": format_timestamp(self.query_time),
            "identity_rule_id": self.identity_rule_id,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "QueryMeta":
        _require(document, ("jurisdiction", "query_time", "identity_rule_id"), "Query meta")
        return cls(
            jurisdiction=str(document["jurisdiction"]),
            query_time=document["query_time"],
            identity_rule_id=str(document["identity_rule_id"]),
        )


class ScopeFailure(str, Enum):
    JURISDICTION = "jurisdiction"
    TIME_WINDOW = "time_window"
    IDENTITY_RULE = "identity_rule"


@dataclass(frozen=True)
class ScopeResult(object):
    passed: bool
    reason: Optional[ScopeFailure] = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "reason": self.reason.value if self.reason else None}


@dataclass(frozen=True)
class StandingResult(object):
    passed: bool
    missing: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "missing": dict(self.missing)}


class UnverifiedHandling(str, Enum):
    COUNT = "count"
    WIDEN = "widen"


@dataclass(frozen=True)
class FeatureDim(object):
    """
    One network input: the saturating count of an evidence class.

    With ``unverified="widen"`` unauthenticated items enter the input box with
    unknown weight, between not counted and fully counted.
    """

    evidence_class: str
    saturation: int
    unverified: UnverifiedHandling = UnverifiedHandling.COUNT

    def __post_init__(self):
        if not isinstance(self.saturation, int) or isinstance(self.saturation, bool) or self.saturation < 1:
            raise ParseError(f"Saturation for {self.evidence_class!r} must be a positive integer")
        try:
            object.__setattr__(self, "unverified", UnverifiedHandling(self.unverified))
        except ValueError:
            raise ParseError(f"Unknown unverified handling {self.unverified!r}")

    def to_dict(self) -> dict:
        return {
            "evidence_class": self.evidence_class,
            "saturation": self.saturation,
            "unverified": self.unverified.value,
        }


@dataclass(frozen=True)
class FeatureSpec(object):
    dims: Tuple[FeatureDim, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))

    def to_dict(self) -> dict:
        return {"dims": [d.to_dict() for d in self.dims]}

    @classmethod
    def from_dict(cls, document: dict) -> "FeatureSpec":
        _require(document, ("dims",), "Feature spec")
        dims = []
        for entry in document["dims"]:
            _require(entry, ("evidence_class", "saturation"), "Feature dimension")
            dims.append(
                FeatureDim(
                    evidence_class=str(entry["evidence_class"]),
                    saturation=entry["saturation"],
                    unverified=entry.get("unverified", UnverifiedHandling.COUNT.value),
                )
            )
        return cls(tuple(dims))
