from .checker import CertificateChecker, adequacy, check_certificate, forces
from .files import load_certificate, load_certificate_document, load_contract, save_certificate, save_contract
from .issuer import issue_certificate, issue_record_certificate
from .models import (
    DEFAULT_ACTIVATIONS,
    DEFAULT_CHALLENGE_ROLES,
    MANDATORY_FIELDS,
    RECORD_CLAIM,
    VERIFIER_VERSION,
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
    RegimeDescriptor,
    config_hash_for,
    replay_seed_for,
)

__all__ = [
    "DEFAULT_ACTIVATIONS",
    "DEFAULT_CHALLENGE_ROLES",
    "MANDATORY_FIELDS",
    "RECORD_CLAIM",
    "VERIFIER_VERSION",
    "CertProvenance",
    "CertScope",
    "CertType",
    "CertificateChecker",
    "CertificateToken",
    "CheckFailure",
    "CheckResult",
    "Claim",
    "ConfigReference",
    "DeploymentContract",
    "FailureCode",
    "Forcing",
    "RegimeDescriptor",
    "adequacy",
    "check_certificate",
    "config_hash_for",
    "forces",
    "issue_certificate",
    "issue_record_certificate",
    "load_certificate",
    "load_certificate_document",
    "load_contract",
    "replay_seed_for",
    "save_certificate",
    "save_contract",
]
