"""
Exception types raised across the gate.

All of them derive from ValueError so existing ``except ValueError`` handlers keep
working. Verification outcomes (certificate checks, policy checks, log replay) are
returned as result values and never raised.
"""


class GateError(ValueError):
    """Base class for every error raised by assertibility_gate."""


class InvalidInterval(GateError):
    pass


class InconsistentHistory(GateError):
    def __init__(self, message: str, stage: int = None):
        super().__init__(message)
        self.stage = stage


class ParseError(GateError):
    pass


class DimensionMismatch(GateError):
    pass


class ArityMismatch(DimensionMismatch):
    pass


class HashMismatch(GateError):
    def __init__(self, message: str, expected: str = None, actual: str = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class IndexOutOfRange(GateError):
    pass


class WitnessRejected(GateError):
    pass


class UnresolvedRecordRef(GateError):
    pass


class UnknownClass(GateError):
    pass


class RecordStoreError(GateError):
    pass


class ConfigurationError(GateError):
    pass


class SoundnessViolation(GateError):
    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class UnauthorizedChallenger(GateError):
    pass


class UnknownCertificate(GateError):
    pass


class NoUpheldChallenge(GateError):
    pass
