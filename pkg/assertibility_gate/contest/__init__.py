from .history import (
    REVISION_REASONS,
    EntitlementHistory,
    recheck,
    replay_verify,
    replay_verify_bytes,
    revise_status,
    submit_challenge,
)
from .models import (
    GENESIS_HASH,
    Acknowledgment,
    Challenge,
    ChallengeGround,
    ChallengerRole,
    HistoryEntry,
    HistoryEvent,
    RecheckOutcome,
    ReplayResult,
)

__all__ = [
    "GENESIS_HASH",
    "REVISION_REASONS",
    "Acknowledgment",
    "Challenge",
    "ChallengeGround",
    "ChallengerRole",
    "EntitlementHistory",
    "HistoryEntry",
    "HistoryEvent",
    "RecheckOutcome",
    "ReplayResult",
    "recheck",
    "replay_verify",
    "replay_verify_bytes",
    "revise_status",
    "submit_challenge",
]
