from typing import Any, Callable, Dict, Hashable, Iterable

from ..certificates.checker import CertificateChecker, forces
from ..certificates.models import Forcing
from ..decision.models import Status
from ..helpers.errors import SoundnessViolation
from ..helpers.logger import setup_logger
from .models import InterfaceOutput

logger = setup_logger(name=__name__)

Oracle = Callable[[Any], InterfaceOutput]

_EXPECTED_FORCING = {Status.ASSERTED: Forcing.ASSERTS, Status.DENIED: Forcing.DENIES}


class Decider(object):
    """
    Decision procedure built on a binary, certificate-returning oracle.

    Each call runs the oracle, re-checks every certificate it returns with an
    independent checker, and answers with the disjunct the certificates force.
    """

    def __init__(self, oracle: Oracle, checker: CertificateChecker):
        self.oracle = oracle
        self.checker = checker

    def __call__(self, x: Any) -> Status:
        output = self.oracle(x)
        if not output.status.is_categorical:
            logger.error(f"Oracle returned U at {x!r}")
            raise SoundnessViolation(f"Oracle is not total: U at {x!r}", point=x)
        if not output.certificates:
            raise SoundnessViolation(f"Oracle returned {output.status.value} without a certificate at {x!r}", point=x)
        for token in output.certificates:
            result = self.checker.check(token)
            if not result.accepted:
                logger.error(f"Certificate {token.cert_hash[:12]} failed re-check at {x!r}: {result.to_dict()}")
                raise SoundnessViolation(
                    f"Certificate at {x!r} fails re-check: {[f.code.value for f in result.failures]}",
                    point=x,
                )
            if forces(token, token.claim.to_predicate()) is not _EXPECTED_FORCING[output.status]:
                raise SoundnessViolation(f"Certificate at {x!r} does not force {output.status.value}", point=x)

        return output.status

    def decide_all(self, points: Iterable[Hashable]) -> Dict[Hashable, Status]:
        return {x: self(x) for x in points}


def derive_decider(oracle: Oracle, checker: CertificateChecker) -> Decider:
    """
    :param oracle: (callable) x -> InterfaceOutput, expected to be binary and certificate-sound on its scope
    :param checker: (CertificateChecker) Independent re-verification under the contract
    :return: (Decider) Raises SoundnessViolation at the first point exposing the oracle
    """
    return Decider(oracle, checker)
