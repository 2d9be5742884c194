"""
Sound interval propagation and bisection refinement.

Every transformer maps an enclosure of a layer's inputs to an enclosure of its
outputs, so composing them encloses the whole network on a box. Refinement
splits input leaves and re-merges leaf enclosures into global, monotonized bounds.
"""
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple

from ..helpers.errors import ArityMismatch, DimensionMismatch, GateError
from ..helpers.logger import setup_logger
from ..intervals import Interval, IntervalSequence
from .activations import monotone_enclosure
from .models import InputBox, Layer, LayerKind, NetworkModel

logger = setup_logger(name=__name__)


@dataclass(frozen=True)
class EnclosureVector(object):
    """One interval per coordinate of a layer's output."""

    dims: Tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))

    @classmethod
    def from_box(cls, box: InputBox) -> "EnclosureVector":
        return cls(box.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __getitem__(self, index: int) -> Interval:
        return self.dims[index]

    def __iter__(self):
        return iter(self.dims)

    def to_dict(self) -> list:
        return [d.to_dict() for d in self.dims]

    @classmethod
    def from_dict(cls, document: Sequence[Any]) -> "EnclosureVector":
        return cls(tuple(Interval.from_dict(d) for d in document))


def propagate_affine(layer: Layer, enclosure: EnclosureVector) -> EnclosureVector:
    """
    Interval image of y = Wx + b.

    :param layer: (Layer) Affine layer
    :param enclosure: (EnclosureVector) Enclosure of x
    :return: (EnclosureVector) Enclosure of y
    """
    if layer.kind is not LayerKind.AFFINE:
        raise GateError(f"propagate_affine got a {layer.kind.value} layer")
    if layer.in_arity != len(enclosure):
        raise DimensionMismatch(f"Affine layer expects {layer.in_arity} inputs, got {len(enclosure)}")
    out = []
    for row, bias in zip(layer.weights, layer.bias):
        lo = hi = bias
        for w, x in zip(row, enclosure.dims):
            if w > 0:
                lo += w * x.lo
                hi += w * x.hi
            elif w < 0:
                lo += w * x.hi
                hi += w * x.lo
        out.append(Interval(lo, hi))
    return EnclosureVector(tuple(out))


def _relu(interval: Interval) -> Interval:
    if interval.hi <= 0:
        return Interval(0, 0)
    if interval.lo >= 0:
        return interval
    return Interval(0, interval.hi)


def propagate_relu(enclosure: EnclosureVector) -> EnclosureVector:
    return EnclosureVector(tuple(_relu(d) for d in enclosure.dims))


def propagate_monotone(layer: Layer, enclosure: EnclosureVector) -> EnclosureVector:
    if layer.kind is not LayerKind.MONOTONE:
        raise GateError(f"propagate_monotone got a {layer.kind.value} layer")
    return EnclosureVector(
        tuple(monotone_enclosure(layer.function_id, d, layer.precision_bits) for d in enclosure.dims)
    )


def propagate_layer(layer: Layer, enclosure: EnclosureVector) -> EnclosureVector:
    if layer.kind is LayerKind.AFFINE:
        return propagate_affine(layer, enclosure)
    if layer.kind is LayerKind.RELU:
        return propagate_relu(enclosure)
    return propagate_monotone(layer, enclosure)


def propagate_box(network: NetworkModel, box: InputBox) -> EnclosureVector:
    """
    Compose the layer transformers over an input box.

    :param network: (NetworkModel)
    :param box: (InputBox) Declared input uncertainty
    :return: (EnclosureVector) Sound enclosure of every network output on the box
    """
    network.check_input_arity(box.arity)
    enclosure = EnclosureVector.from_box(box)
    for layer in network.layers:
        enclosure = propagate_layer(layer, enclosure)

    return enclosure


def _check_spec_arity(coefficients: Sequence[Fraction], z: EnclosureVector):
    if len(coefficients) != len(z):
        raise ArityMismatch(f"Linear spec has {len(coefficients)} coefficients for {len(z)} outputs")


def bound_linear_spec(
    coefficients: Sequence[Fraction],
    offset: Fraction,
    z: EnclosureVector,
) -> Fraction:
    """
    Sound upper bound UB of c.z + d over the enclosure; UB <= 0 certifies c.z + d <= 0.
    """
    _check_spec_arity(coefficients, z)
    upper = Fraction(offset)
    for c, d in zip(coefficients, z.dims):
        upper += c * d.hi if c >= 0 else c * d.lo
    return upper


def lower_linear_spec(
    coefficients: Sequence[Fraction],
    offset: Fraction,
    z: EnclosureVector,
) -> Fraction:
    """Sound lower bound LB of c.z + d; LB > 0 certifies the negation of the spec."""
    _check_spec_arity(coefficients, z)
    lower = Fraction(offset)
    for c, d in zip(coefficients, z.dims):
        lower += c * d.lo if c >= 0 else c * d.hi
    return lower


# Refinement


def relevant_dimensions(network: NetworkModel, box: InputBox) -> Tuple[int, ...]:
    """
    Input coordinates worth splitting: positive width and, when the first layer is
    affine, a nonzero weight column.
    """
    first = network.layers[0]
    dims = []
    for index, interval in enumerate(box.dims):
        if interval.is_degenerate:
            continue
        if first.kind is LayerKind.AFFINE and all(row[index] == 0 for row in first.weights):
            continue
        dims.append(index)
    return tuple(dims)


def split_dimension(network: NetworkModel, box: InputBox) -> Optional[int]:
    """Widest relevant coordinate, ties to the lowest index; None if nothing splits."""
    best = None
    for index in relevant_dimensions(network, box):
        if best is None or box.dims[index].width > box.dims[best].width:
            best = index
    return best


def _merge(leaf_bounds: Sequence[EnclosureVector]) -> Tuple[Interval, ...]:
    arity = len(leaf_bounds[0])
    return tuple(
        Interval(
            min(bounds[j].lo for bounds in leaf_bounds),
            max(bounds[j].hi for bounds in leaf_bounds),
        )
        for j in range(arity)
    )


@dataclass(frozen=True)
class RefinementState(object):
    """
    Leaves of the bisected input box with their enclosures and the monotonized
    per-output bound histories.

    ``exhausted`` is set when the last refine call could not pay for a full stage;
    ``fixed_point`` when no leaf can be split any further.
    """

    leaves: Tuple[InputBox, ...]
    leaf_bounds: Tuple[EnclosureVector, ...]
    histories: Tuple[IntervalSequence, ...]
    stage: int = 0
    cost_spent: int = 0
    exhausted: bool = False
    fixed_point: bool = False

    @property
    def bounds(self) -> EnclosureVector:
        return EnclosureVector(tuple(history.latest for history in self.histories))

    def history(self, output_index: int) -> IntervalSequence:
        return self.histories[output_index]


def initial_state(network: NetworkModel, box: InputBox) -> RefinementState:
    """Stage 0: the whole box as a single leaf, at the cost of one propagation."""
    bounds = propagate_box(network, box)
    return RefinementState(
        leaves=(box,),
        leaf_bounds=(bounds,),
        histories=tuple(IntervalSequence((d,)) for d in bounds.dims),
        stage=0,
        cost_spent=1,
    )


def stage_cost(state: RefinementState, network: NetworkModel) -> int:
    """Leaf propagations the next stage needs: two per splittable leaf."""
    return 2 * sum(1 for leaf in state.leaves if split_dimension(network, leaf) is not None)


def refine(
    state: RefinementState,
    network: NetworkModel,
    budget_remaining: int,
) -> RefinementState:
    """
    Run one bisection round: every splittable leaf is halved along its widest
    relevant coordinate and both halves are propagated.

    :param state: (RefinementState) Current stage
    :param network: (NetworkModel)
    :param budget_remaining: (int) Leaf propagations still affordable
    :return: (RefinementState) Next stage, or the same stage flagged exhausted / fixed_point
    """
    if budget_remaining < 0:
        raise GateError(f"budget_remaining must be >= 0, got {budget_remaining}")

    cost = stage_cost(state, network)
    if cost == 0:
        logger.debug(f"Stage {state.stage}: no splittable leaf, fixed point")
        return replace(state, exhausted=False, fixed_point=True)
    if cost > budget_remaining:
        logger.debug(f"Stage {state.stage + 1} needs {cost} propagations, {budget_remaining} left")
        return replace(state, exhausted=True, fixed_point=False)

    leaves = []
    leaf_bounds = []
    for leaf, bounds in zip(state.leaves, state.leaf_bounds):
        dim = split_dimension(network, leaf)
        if dim is None:
            leaves.append(leaf)
            leaf_bounds.append(bounds)
            continue
        for half in leaf.split(dim):
            leaves.append(half)
            leaf_bounds.append(propagate_box(network, half))

    raw = _merge(leaf_bounds)
    histories = tuple(history.extend(interval) for history, interval in zip(state.histories, raw))
    next_state = RefinementState(
        leaves=tuple(leaves),
        leaf_bounds=tuple(leaf_bounds),
        histories=histories,
        stage=state.stage + 1,
        cost_spent=state.cost_spent + cost,
    )
    logger.debug(
        f"Stage {next_state.stage}: {len(leaves)} leaves, cost {next_state.cost_spent}, "
        f"bounds {[str(d) for d in next_state.bounds]}"
    )

    return next_state
