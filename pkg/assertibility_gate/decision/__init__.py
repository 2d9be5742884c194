from .forcing import (
    argmax_status_at_stage,
    budgeted_decide,
    forced_status,
    linear_status_at_stage,
    make_witness,
    status_at_stage,
    threshold_status_at_stage,
    witness_check,
)
from .models import (
    ArgmaxMode,
    ArgmaxPredicate,
    DecideResult,
    ForcingWitness,
    LinearSpecPredicate,
    Predicate,
    SeparationPair,
    Status,
    ThresholdPredicate,
    WitnessKind,
    predicate_from_dict,
)

__all__ = [
    "ArgmaxMode",
    "ArgmaxPredicate",
    "DecideResult",
    "ForcingWitness",
    "LinearSpecPredicate",
    "Predicate",
    "SeparationPair",
    "Status",
    "ThresholdPredicate",
    "WitnessKind",
    "argmax_status_at_stage",
    "budgeted_decide",
    "forced_status",
    "linear_status_at_stage",
    "make_witness",
    "predicate_from_dict",
    "status_at_stage",
    "threshold_status_at_stage",
    "witness_check",
]
