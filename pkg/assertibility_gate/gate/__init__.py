from .decider import Decider, derive_decider
from .interface import (
    AssertibilityGate,
    classify_undetermined,
    evaluate_interface,
    render_transcript,
    threshold_bounds,
)
from .models import InterfaceOutput, Query, ReasonClass, UndeterminedDetail, load_query

__all__ = [
    "AssertibilityGate",
    "Decider",
    "InterfaceOutput",
    "Query",
    "ReasonClass",
    "UndeterminedDetail",
    "classify_undetermined",
    "derive_decider",
    "evaluate_interface",
    "load_query",
    "render_transcript",
    "threshold_bounds",
]
