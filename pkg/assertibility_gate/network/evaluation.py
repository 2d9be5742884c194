from fractions import Fraction
from typing import Any, List, Sequence, Union

from ..helpers.logger import setup_logger
from ..helpers.utilities import parse_rational
from ..intervals import Interval
from .activations import monotone_enclosure
from .models import LayerKind, NetworkModel
from .propagation import EnclosureVector, propagate_layer

logger = setup_logger(name=__name__)


def evaluate_point(network: NetworkModel, x: Sequence[Any]) -> EnclosureVector:
    """
    Forward pass on a single input.

    Affine and ReLU layers run in exact rational arithmetic. The first monotone layer
    turns values into narrow enclosures at its precision_bits; later layers continue on
    those enclosures.

    :param network: (NetworkModel)
    :param x: (list) Input coordinates, rationals or rational text
    :return: (EnclosureVector) Degenerate intervals for exact paths, narrow ones otherwise
    """
    network.check_input_arity(len(x))
    values: List[Union[Fraction, Interval]] = [parse_rational(v) for v in x]
    exact = True

    for layer in network.layers:
        if not exact:
            values = list(propagate_layer(layer, EnclosureVector(tuple(values))).dims)
        elif layer.kind is LayerKind.AFFINE:
            values = [
                b + sum((w * v for w, v in zip(row, values)), Fraction(0))
                for row, b in zip(layer.weights, layer.bias)
            ]
        elif layer.kind is LayerKind.RELU:
            values = [v if v > 0 else Fraction(0) for v in values]
        else:
            values = [
                monotone_enclosure(layer.function_id, Interval(v, v), layer.precision_bits)
                for v in values
            ]
            exact = False

    if exact:
        return EnclosureVector(tuple(Interval(v, v) for v in values))
    return EnclosureVector(tuple(values))
