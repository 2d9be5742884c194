from .activations import monotone_enclosure
from .evaluation import evaluate_point
from .loader import dump_network, load_network
from .models import InputBox, Layer, LayerKind, MonotoneFunction, NetworkModel
from .propagation import (
    EnclosureVector,
    RefinementState,
    bound_linear_spec,
    initial_state,
    lower_linear_spec,
    propagate_affine,
    propagate_box,
    propagate_monotone,
    propagate_relu,
    refine,
    split_dimension,
)

__all__ = [
    "EnclosureVector",
    "InputBox",
    "Layer",
    "LayerKind",
    "MonotoneFunction",
    "NetworkModel",
    "RefinementState",
    "bound_linear_spec",
    "dump_network",
    "evaluate_point",
    "initial_state",
    "load_network",
    "lower_linear_spec",
    "monotone_enclosure",
    "propagate_affine",
    "propagate_box",
    "propagate_monotone",
    "propagate_relu",
    "refine",
    "split_dimension",
]
