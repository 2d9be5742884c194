from .features import box_from_record, features_from_record
from .models import (
    DEFAULT_EVIDENCE_CLASSES,
    FeatureDim,
    FeatureSpec,
    ItemProvenance,
    QueryMeta,
    RecordItem,
    ScopeFailure,
    ScopePolicy,
    ScopeResult,
    StandingPolicy,
    StandingResult,
    UnverifiedHandling,
)
from .policies import evaluate_scope, evaluate_standing, load_policies
from .store import RecordStore, record_asof

__all__ = [
    "DEFAULT_EVIDENCE_CLASSES",
    "FeatureDim",
    "FeatureSpec",
    "ItemProvenance",
    "QueryMeta",
    "RecordItem",
    "RecordStore",
    "ScopeFailure",
    "ScopePolicy",
    "ScopeResult",
    "StandingPolicy",
    "StandingResult",
    "UnverifiedHandling",
    "box_from_record",
    "evaluate_scope",
    "evaluate_standing",
    "features_from_record",
    "load_policies",
    "record_asof",
]
