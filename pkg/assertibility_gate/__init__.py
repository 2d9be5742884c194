from .certificates.checker import CertificateChecker, check_certificate
from .certificates.models import CertificateToken, DeploymentContract
from .contest.history import EntitlementHistory
from .decision.forcing import budgeted_decide, witness_check
from .gate.interface import AssertibilityGate, evaluate_interface
from .gate.models import InterfaceOutput, Query
from .intervals import Interval, IntervalSequence
from .network.loader import load_network
from .network.models import InputBox, NetworkModel
from .records.store import RecordStore

__version__ = "0.1.0"

__all__ = [
    "AssertibilityGate",
    "CertificateChecker",
    "CertificateToken",
    "DeploymentContract",
    "EntitlementHistory",
    "InputBox",
    "InterfaceOutput",
    "Interval",
    "IntervalSequence",
    "NetworkModel",
    "Query",
    "RecordStore",
    "budgeted_decide",
    "check_certificate",
    "evaluate_interface",
    "load_network",
    "witness_check",
]
