from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

from ..decision.models import (
    ArgmaxPredicate,
    ForcingWitness,
    LinearSpecPredicate,
    Predicate,
    Status,
    ThresholdPredicate,
)
from ..helpers.canonical import canonical_hash, sha256_hex, without_key
from ..helpers.errors import ConfigurationError, HashMismatch, ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_rational, format_timestamp, parse_rational, parse_timestamp

logger = setup_logger(name=__name__)

VERIFIER_VERSION = "assertibility-gate-verifier/1"
DEFAULT_ACTIVATIONS = ("relu", "sigmoid", "tanh")
DEFAULT_CHALLENGE_ROLES = ("affected_party", "auditor")
RECORD_CLAIM = "record"


def _require(document: Any, keys: Sequence[str], what: str) -> dict:
    if not isinstance(document, dict):
        raise ParseError(f"{what} must be an object, got {document!r}")
    missing = [key for key in keys if key not in document]
    if missing:
        raise ParseError(f"{what} is missing {', '.join(missing)}")
    return document


@dataclass(frozen=True)
class RegimeDescriptor(object):
    """Internal regime R: what the witness producer supports and how it computes."""

    activations: Tuple[str, ...] = DEFAULT_ACTIVATIONS
    precision_bits: int = 32
    refinement: str = "bisection-widest-dim"
    arithmetic: str = "exact-rational"

    def __post_init__(self):
        object.__setattr__(self, "activations", tuple(sorted(set(self.activations))))

    def to_dict(self) -> dict:
        return {
            "activations": list(self.activations),
            "precision_bits": self.precision_bits,
            "refinement": self.refinement,
            "arithmetic": self.arithmetic,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "RegimeDescriptor":
        _require(document, ("activations", "precision_bits"), "Regime descriptor")
        return cls(
            activations=tuple(document["activations"]),
            precision_bits=int(document["precision_bits"]),
            refinement=document.get("refinement", "bisection-widest-dim"),
            arithmetic=document.get("arithmetic", "exact-rational"),
        )


@dataclass(frozen=True)
class ConfigReference(object):
    """t_int: when and with which pinned artifacts the internal regime was configured."""

    timestamp: datetime
    model_hash: str
    verifier_version: str
    config_hash: str

    def __post_init__(self):
        object.__setattr__(self, "timestamp", parse_timestamp(self.timestamp))

    def to_dict(self) -> dict:
        return {
            "timestamp": format_timestamp(self.timestamp),
            "model_hash": self.model_hash,
            "verifier_version": self.verifier_version,
            "config_hash": self.config_hash,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "ConfigReference":
        _require(document, ("timestamp", "model_hash", "verifier_version", "config_hash"), "t_int")
        return cls(
            timestamp=document["timestamp"],
            model_hash=str(document["model_hash"]),
            verifier_version=str(document["verifier_version"]),
            config_hash=str(document["config_hash"]),
        )


def config_hash_for(regime: RegimeDescriptor, input_radius: Fraction) -> str:
    """Digest of the gate configuration pinned in t_int."""
    return canonical_hash(
        {
            "regime": regime.to_dict(),
            "input_radius": format_rational(input_radius),
        }
    )


@dataclass(frozen=True)
class DeploymentContract(object):
    """
    The contract every categorical output is relative to: scope, regime, pinned
    configuration, budget and stage cap, evidential standard, threshold and record time.

    Build instances with ``DeploymentContract.build`` so ``contract_hash`` is sealed.
    """

    scope_policy_id: str
    regime: RegimeDescriptor
    t_int: ConfigReference
    budget: int
    n_max: int
    standing_policy_id: str
    tau: Fraction
    record_time: datetime
    input_radius: Fraction = Fraction(0)
    challenge_roles: Tuple[str, ...] = DEFAULT_CHALLENGE_ROLES
    contract_hash: str = field(default="", compare=False)

    def __post_init__(self):
        for name in ("budget", "n_max"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                logger.error(f"Contract {name} must be a non-negative integer, got {value!r}")
                raise ConfigurationError(f"Contract {name} must be a non-negative integer, got {value!r}")
        radius = parse_rational(self.input_radius)
        if radius < 0:
            raise ConfigurationError(f"Contract input_radius must be >= 0, got {radius}")
        object.__setattr__(self, "tau", parse_rational(self.tau))
        object.__setattr__(self, "input_radius", radius)
        object.__setattr__(self, "record_time", parse_timestamp(self.record_time))
        object.__setattr__(self, "challenge_roles", tuple(sorted(set(self.challenge_roles))))

    @classmethod
    def build(cls, **fields) -> "DeploymentContract":
        fields.pop("contract_hash", None)
        contract = cls(**fields)
        return contract.sealed()

    def sealed(self) -> "DeploymentContract":
        return replace(self, contract_hash=self.compute_hash())

    def hash_payload(self) -> dict:
        return {
            "scope_policy_id": self.scope_policy_id,
            "regime": self.regime.to_dict(),
            "t_int": self.t_int.to_dict(),
            "budget": self.budget,
            "n_max": self.n_max,
            "standing_policy_id": self.standing_policy_id,
            "tau": format_rational(self.tau),
            "record_time": format_timestamp(self.record_time),
            "input_radius": format_rational(self.input_radius),
            "challenge_roles": list(self.challenge_roles),
        }

    def compute_hash(self) -> str:
        return canonical_hash(self.hash_payload())

    @property
    def hash_is_valid(self) -> bool:
        return self.contract_hash == self.compute_hash()

    @property
    def expected_config_hash(self) -> str:
        return config_hash_for(self.regime, self.input_radius)

    def at_record_time(self, t: Any) -> "DeploymentContract":
        """The same contract evaluated at another record time."""
        return replace(self, record_time=parse_timestamp(t)).sealed()

    def revised(self, **changes) -> "DeploymentContract":
        """A new contract version with some fields changed."""
        return replace(self, **changes).sealed()

    def assumptions(self) -> List[str]:
        """Regime assumptions every certificate under this contract declares."""
        return [
            f"arithmetic={self.regime.arithmetic}",
            f"refinement={self.regime.refinement}",
            f"activations={','.join(self.regime.activations)}",
            f"precision_bits={self.regime.precision_bits}",
            f"input_radius={format_rational(self.input_radius)}",
            f"budget={self.budget}",
            f"n_max={self.n_max}",
        ]

    def to_dict(self) -> dict:
        document = self.hash_payload()
        document["contract_hash"] = self.contract_hash
        return document

    @classmethod
    def from_dict(cls, document: dict, verify: bool = True) -> "DeploymentContract":
        """
        :param document: (dict) Parsed ``.contract.json``
        :param verify: (bool) Raise HashMismatch when the embedded digest disagrees
        """
        _require(
            document,
            ("scope_policy_id", "regime", "t_int", "budget", "n_max", "standing_policy_id", "tau", "record_time"),
            "Contract",
        )
        contract = cls(
            scope_policy_id=str(document["scope_policy_id"]),
            regime=RegimeDescriptor.from_dict(document["regime"]),
            t_int=ConfigReference.from_dict(document["t_int"]),
            budget=document["budget"],
            n_max=document["n_max"],
            standing_policy_id=str(document["standing_policy_id"]),
            tau=document["tau"],
            record_time=document["record_time"],
            input_radius=document.get("input_radius", 0),
            challenge_roles=tuple(document.get("challenge_roles", DEFAULT_CHALLENGE_ROLES)),
        )
        embedded = document.get("contract_hash")
        computed = contract.compute_hash()
        if verify and "contract_hash" in document and embedded != computed:
            logger.error(f"Contract embeds hash {embedded}, content hashes to {computed}")
            raise HashMismatch("Embedded contract_hash does not match the contract content", embedded, computed)
        return replace(contract, contract_hash=embedded or computed)


@dataclass(frozen=True)
class Claim(object):
    """The model-claim a certificate licenses, with the status it claims."""

    predicate: str
    query_id: str
    candidate_index: Optional[int]
    status: Status
    tau: Optional[Fraction] = None
    mode: Optional[str] = None
    top_k: Optional[Tuple[int, ...]] = None
    coefficients: Optional[Tuple[Fraction, ...]] = None
    offset: Optional[Fraction] = None
    statement: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        if self.tau is not None:
            object.__setattr__(self, "tau", parse_rational(self.tau))
        if self.top_k is not None:
            object.__setattr__(self, "top_k", tuple(sorted(self.top_k)))
        if self.coefficients is not None:
            object.__setattr__(self, "coefficients", tuple(parse_rational(c) for c in self.coefficients))
        if self.offset is not None:
            object.__setattr__(self, "offset", parse_rational(self.offset))

    @classmethod
    def for_predicate(cls, predicate: Predicate, query_id: str, status: Status) -> "Claim":
        if isinstance(predicate, ThresholdPredicate):
            return cls(predicate.kind, query_id, predicate.output_index, status, tau=predicate.tau)
        if isinstance(predicate, ArgmaxPredicate):
            return cls(
                predicate.kind,
                query_id,
                predicate.candidate_index,
                status,
                mode=predicate.mode.value,
                top_k=tuple(sorted(predicate.top_k)) if predicate.top_k else None,
            )
        return cls(
            predicate.kind,
            query_id,
            None,
            status,
            coefficients=predicate.coefficients,
            offset=predicate.offset,
        )

    @classmethod
    def for_record(cls, query_id: str, statement: str) -> "Claim":
        """A record-only claim: the referenced items say what ``statement`` says."""
        return cls(RECORD_CLAIM, query_id, None, Status.ASSERTED, statement=statement)

    @property
    def is_record_claim(self) -> bool:
        return self.predicate == RECORD_CLAIM

    def to_predicate(self) -> Predicate:
        if self.predicate == ThresholdPredicate.kind:
            return ThresholdPredicate(self.candidate_index, self.tau)
        if self.predicate == ArgmaxPredicate.kind:
            return ArgmaxPredicate(
                self.candidate_index,
                self.mode,
                frozenset(self.top_k) if self.top_k is not None else None,
            )
        if self.predicate == LinearSpecPredicate.kind:
            return LinearSpecPredicate(self.coefficients, self.offset)
        raise ParseError(f"Unknown claim predicate {self.predicate!r}")

    def to_dict(self) -> dict:
        document = {
            "predicate": self.predicate,
            "query_id": self.query_id,
            "candidate_index": self.candidate_index,
            "status": self.status.value,
            "tau": format_rational(self.tau) if self.tau is not None else None,
            "mode": self.mode,
            "top_k": list(self.top_k) if self.top_k is not None else None,
            "coefficients": [format_rational(c) for c in self.coefficients] if self.coefficients is not None else None,
            "offset": format_rational(self.offset) if self.offset is not None else None,
        }
        if self.statement is not None:
            document["statement"] = self.statement
        return document

    @classmethod
    def from_dict(cls, document: dict) -> "Claim":
        _require(document, ("predicate", "query_id", "status"), "Claim")
        try:
            return cls(
                predicate=document["predicate"],
                query_id=document["query_id"],
                candidate_index=document.get("candidate_index"),
                status=document["status"],
                tau=document.get("tau"),
                mode=document.get("mode"),
                top_k=document.get("top_k"),
                coefficients=document.get("coefficients"),
                offset=document.get("offset"),
                statement=document.get("statement"),
            )
        except ValueError as e:
            raise ParseError(f"Malformed claim: {e}")


@dataclass(frozen=True)
class CertScope(object):
    """Sigma_kappa: where, when and for whom the certificate claims to apply."""

    jurisdiction: str
    time_window: Tuple[datetime, datetime]
    identity_rule_id: str

    def __post_init__(self):
        object.__setattr__(self, "time_window", tuple(parse_timestamp(t) for t in self.time_window))

    def to_dict(self) -> dict:
        return {
            "jurisdiction": self.jurisdiction,
            "time_window": [format_timestamp(t) for t in self.time_window],
            "identity_rule_id": self.identity_rule_id,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "CertScope":
        _require(document, ("jurisdiction", "time_window", "identity_rule_id"), "Certificate scope")
        window = document["time_window"]
        if not isinstance(window, (list, tuple)) or len(window) != 2:
            raise ParseError("Certificate scope time_window must be [start, end]")
        return cls(document["jurisdiction"], (window[0], window[1]), document["identity_rule_id"])


def replay_seed_for(query_id: str) -> str:
    return sha256_hex(query_id.encode("utf-8"))[:16]


@dataclass(frozen=True)
class CertProvenance(object):
    model_hash: str
    verifier_version: str
    config_hash: str
    record_item_hashes: Tuple[str, ...]
    replay_seed: str

    def __post_init__(self):
        object.__setattr__(self, "record_item_hashes", tuple(self.record_item_hashes))

    def to_dict(self) -> dict:
        return {
            "model_hash": self.model_hash,
            "verifier_version": self.verifier_version,
            "config_hash": self.config_hash,
            "record_item_hashes": list(self.record_item_hashes),
            "replay_seed": self.replay_seed,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "CertProvenance":
        _require(
            document,
            ("model_hash", "verifier_version", "config_hash", "record_item_hashes", "replay_seed"),
            "Provenance",
        )
        return cls(
            model_hash=document["model_hash"],
            verifier_version=document["verifier_version"],
            config_hash=document["config_hash"],
            record_item_hashes=tuple(document["record_item_hashes"]),
            replay_seed=document["replay_seed"],
        )


class CertType(str, Enum):
    FORMAL = "formal"
    INSTITUTIONAL = "institutional"
    MIXED = "mixed"


def parse_witness(document: Any) -> Optional[ForcingWitness]:
    """Institutional tokens carry a null witness."""
    return None if document is None else ForcingWitness.from_dict(document)


MANDATORY_FIELDS = (
    "cert_type",
    "claim",
    "witness",
    "assumptions",
    "scope",
    "record_time",
    "t_int",
    "provenance",
    "cert_hash",
)


@dataclass(frozen=True)
class CertificateToken(object):
    """
    Boundary object carrying a witness together with its assumptions, scope,
    time indices and provenance. ``cert_hash`` seals every other field.
    """

    cert_type: CertType
    claim: Claim
    witness: Optional[ForcingWitness]
    assumptions: Tuple[str, ...]
    scope: CertScope
    record_time: datetime
    t_int: ConfigReference
    provenance: CertProvenance
    cert_hash: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cert_type", CertType(self.cert_type))
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        object.__setattr__(self, "record_time", parse_timestamp(self.record_time))

    def hash_payload(self) -> dict:
        return without_key(self.to_dict(), "cert_hash")

    def compute_hash(self) -> str:
        return canonical_hash(self.hash_payload())

    def resealed(self) -> "CertificateToken":
        return replace(self, cert_hash=self.compute_hash())

    def to_dict(self) -> dict:
        return {
            "cert_type": self.cert_type.value,
            "claim": self.claim.to_dict(),
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "assumptions": list(self.assumptions),
            "scope": self.scope.to_dict(),
            "record_time": format_timestamp(self.record_time),
            "t_int": self.t_int.to_dict(),
            "provenance": self.provenance.to_dict(),
            "cert_hash": self.cert_hash,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "CertificateToken":
        _require(document, MANDATORY_FIELDS, "Certificate")
        try:
            return cls(
                cert_type=document["cert_type"],
                claim=Claim.from_dict(document["claim"]),
                witness=parse_witness(document["witness"]),
                assumptions=tuple(document["assumptions"]),
                scope=CertScope.from_dict(document["scope"]),
                record_time=document["record_time"],
                t_int=ConfigReference.from_dict(document["t_int"]),
                provenance=CertProvenance.from_dict(document["provenance"]),
                cert_hash=document["cert_hash"],
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Malformed certificate: {e}")


class FailureCode(str, Enum):
    WITNESS_INVALID = "WITNESS_INVALID"
    SCOPE_MISMATCH = "SCOPE_MISMATCH"
    STANDING_FAIL = "STANDING_FAIL"
    PROVENANCE_FAIL = "PROVENANCE_FAIL"
    FIELD_MISSING = "FIELD_MISSING"
    HASH_MISMATCH = "HASH_MISMATCH"


@dataclass(frozen=True)
class CheckFailure(object):
    field: str
    code: FailureCode

    def to_dict(self) -> dict:
        return {"field": self.field, "code": self.code.value}


@dataclass(frozen=True)
class CheckResult(object):
    accepted: bool
    failures: Tuple[CheckFailure, ...] = ()

    @classmethod
    def from_failures(cls, failures: Sequence[CheckFailure]) -> "CheckResult":
        unique = tuple(dict.fromkeys(failures))
        return cls(not unique, unique)

    @property
    def codes(self) -> Tuple[FailureCode, ...]:
        return tuple(f.code for f in self.failures)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "failures": [f.to_dict() for f in self.failures],
        }


class Forcing(str, Enum):
    ASSERTS = "asserts"
    DENIES = "denies"
    NEITHER = "neither"
