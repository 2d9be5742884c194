from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple

from ..helpers.canonical import canonical_hash
from ..helpers.errors import ArityMismatch, DimensionMismatch, ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_rational, parse_rational
from ..intervals import Interval

logger = setup_logger(name=__name__)

MIN_PRECISION_BITS = 8


class LayerKind(str, Enum):
    AFFINE = "affine"
    RELU = "relu"
    MONOTONE = "monotone"


class MonotoneFunction(str, Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"


@dataclass(frozen=True)
class Layer(object):
    """
    One feed-forward layer: affine map, ReLU, or a monotone activation.

    Affine weights are stored row-major, one row per output unit.
    """

    kind: LayerKind
    weights: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    bias: Optional[Tuple[Fraction, ...]] = None
    function_id: Optional[MonotoneFunction] = None
    precision_bits: Optional[int] = None

    def __post_init__(self):
        try:
            kind = LayerKind(self.kind)
        except ValueError:
            raise ParseError(f"Unknown layer kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)

        if kind is LayerKind.AFFINE:
            if self.weights is None or self.bias is None:
                raise ParseError("Affine layer needs weights and bias")
            weights = tuple(tuple(parse_rational(w) for w in row) for row in self.weights)
            bias = tuple(parse_rational(b) for b in self.bias)
            if not weights or not weights[0]:
                raise DimensionMismatch("Affine layer has an empty weight matrix")
            if any(len(row) != len(weights[0]) for row in weights):
                raise DimensionMismatch("Affine weight matrix rows have different lengths")
            if len(bias) != len(weights):
                raise DimensionMismatch(
                    f"Affine bias has {len(bias)} entries for {len(weights)} weight rows"
                )
            object.__setattr__(self, "weights", weights)
            object.__setattr__(self, "bias", bias)

        elif kind is LayerKind.MONOTONE:
            try:
                function_id = MonotoneFunction(self.function_id)
            except ValueError:
                raise ParseError(f"Unknown monotone function {self.function_id!r}")
            if (
                not isinstance(self.precision_bits, int)
                or isinstance(self.precision_bits, bool)
                or self.precision_bits < MIN_PRECISION_BITS
            ):
                raise ParseError(
                    f"Monotone layer precision_bits must be an integer >= {MIN_PRECISION_BITS}, "
                    f"got {self.precision_bits!r}"
                )
            object.__setattr__(self, "function_id", function_id)

    @classmethod
    def affine(
        cls,
        weights: Sequence[Sequence[Any]],
        bias: Sequence[Any],
    ) -> "Layer":
        return cls(LayerKind.AFFINE, weights=weights, bias=bias)

    @classmethod
    def relu(cls) -> "Layer":
        return cls(LayerKind.RELU)

    @classmethod
    def monotone(
        cls,
        function_id: str,
        precision_bits: int = 32,
    ) -> "Layer":
        return cls(LayerKind.MONOTONE, function_id=function_id, precision_bits=precision_bits)

    @property
    def in_arity(self) -> Optional[int]:
        return len(self.weights[0]) if self.kind is LayerKind.AFFINE else None

    @property
    def out_arity(self) -> Optional[int]:
        return len(self.weights) if self.kind is LayerKind.AFFINE else None

    def to_dict(self) -> dict:
        if self.kind is LayerKind.AFFINE:
            return {
                "kind": self.kind.value,
                "weights": [[format_rational(w) for w in row] for row in self.weights],
                "bias": [format_rational(b) for b in self.bias],
            }
        if self.kind is LayerKind.MONOTONE:
            return {
                "kind": self.kind.value,
                "function_id": self.function_id.value,
                "precision_bits": self.precision_bits,
            }
        return {"kind": self.kind.value}

    @classmethod
    def from_dict(cls, document: dict) -> "Layer":
        if not isinstance(document, dict) or "kind" not in document:
            raise ParseError(f"Layer entry must be an object with a kind: {document!r}")
        return cls(
            document["kind"],
            weights=document.get("weights"),
            bias=document.get("bias"),
            function_id=document.get("function_id"),
            precision_bits=document.get("precision_bits"),
        )


@dataclass(frozen=True)
class NetworkModel(object):
    """
    Immutable feed-forward scoring network with a self-describing digest.

    Use ``NetworkModel.build`` to validate the layer chain and compute ``model_hash``.
    """

    name: str
    layers: Tuple[Layer, ...]
    input_arity: int
    output_arity: int
    model_hash: str = field(default="", compare=False)

    @classmethod
    def build(
        cls,
        name: str,
        input_arity: int,
        layers: Sequence[Layer],
    ) -> "NetworkModel":
        """
        Validate the layer chain and seal the network.

        :param name: (str) Model name
        :param input_arity: (int) Number of input coordinates
        :param layers: (list) Layer objects in evaluation order
        :return: (NetworkModel)
        """
        if not isinstance(input_arity, int) or isinstance(input_arity, bool) or input_arity < 1:
            raise ParseError(f"input_arity must be a positive integer, got {input_arity!r}")
        layers = tuple(layers)
        if not layers:
            raise ParseError("Network has no layers")
        arity = input_arity
        for index, layer in enumerate(layers):
            if layer.kind is LayerKind.AFFINE:
                if layer.in_arity != arity:
                    logger.error(f"Layer {index} expects {layer.in_arity} inputs, previous layer gives {arity}")
                    raise DimensionMismatch(
                        f"Layer {index} expects {layer.in_arity} inputs but receives {arity}"
                    )
                arity = layer.out_arity
        network = cls(
            name=str(name),
            layers=layers,
            input_arity=input_arity,
            output_arity=arity,
        )
        object.__setattr__(network, "model_hash", canonical_hash(network.hash_payload()))

        return network

    def hash_payload(self) -> dict:
        return {
            "name": self.name,
            "input_arity": self.input_arity,
            "layers": [layer.to_dict() for layer in self.layers],
        }

    def to_dict(self) -> dict:
        document = self.hash_payload()
        document["model_hash"] = self.model_hash
        return document

    @property
    def monotone_functions(self) -> Tuple[str, ...]:
        return tuple(
            sorted({layer.function_id.value for layer in self.layers if layer.kind is LayerKind.MONOTONE})
        )

    @property
    def uses_relu(self) -> bool:
        return any(layer.kind is LayerKind.RELU for layer in self.layers)

    def check_input_arity(self, arity: int):
        if arity != self.input_arity:
            logger.error(f"Network {self.name} takes {self.input_arity} inputs, got {arity}")
            raise ArityMismatch(f"Network {self.name} takes {self.input_arity} inputs, got {arity}")


@dataclass(frozen=True)
class InputBox(object):
    """Axis-aligned box of input coordinates."""

    dims: Tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not all(isinstance(d, Interval) for d in self.dims):
            raise ParseError("InputBox dimensions must be Interval values")

    @classmethod
    def from_point(cls, x: Sequence[Any]) -> "InputBox":
        return cls(tuple(Interval.point(v) for v in x))

    @property
    def arity(self) -> int:
        return len(self.dims)

    @property
    def is_degenerate(self) -> bool:
        return all(d.is_degenerate for d in self.dims)

    def widened(self, radius: Fraction) -> "InputBox":
        if not radius:
            return self
        return InputBox(tuple(Interval(d.lo - radius, d.hi + radius) for d in self.dims))

    def split(self, dim: int) -> Tuple["InputBox", "InputBox"]:
        """Bisect along one coordinate; the halves share the midpoint face."""
        target = self.dims[dim]
        mid = target.midpoint
        lower = self.dims[:dim] + (Interval(target.lo, mid),) + self.dims[dim + 1:]
        upper = self.dims[:dim] + (Interval(mid, target.hi),) + self.dims[dim + 1:]
        return InputBox(lower), InputBox(upper)

    def contains(self, x: Sequence[Any]) -> bool:
        return len(x) == self.arity and all(d.contains(v) for d, v in zip(self.dims, x))

    def to_dict(self) -> dict:
        return {"dims": [d.to_dict() for d in self.dims]}
