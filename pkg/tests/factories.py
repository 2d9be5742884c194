import random
from fractions import Fraction

import numpy as np

from assertibility_gate.helpers import sha256_hex
from assertibility_gate.intervals import Interval
from assertibility_gate.network import InputBox, Layer, LayerKind, NetworkModel
from assertibility_gate.records import ItemProvenance, RecordItem


def make_item(item_id, evidence_class="press_report", timestamp="2025-02-10T09:00:00Z", authenticated=True):
    return RecordItem(
        item_id=item_id,
        content_hash=sha256_hex(item_id.encode("utf-8")),
        evidence_class=evidence_class,
        timestamp=timestamp,
        provenance=ItemProvenance(source_id=f"{item_id}-source", custody_chain=("clerk",), authenticated=authenticated),
    )


def identity_network():
    return NetworkModel.build("identity", 1, [Layer.affine([[1]], [0])])


def relu_network():
    return NetworkModel.build("relu-1", 1, [Layer.affine([[1]], [0]), Layer.relu()])


def numpy_forward(network: NetworkModel, points: np.ndarray) -> np.ndarray:
    values = points
    for layer in network.layers:
        if layer.kind is LayerKind.AFFINE:
            weights = np.array([[float(w) for w in row] for row in layer.weights])
            bias = np.array([float(b) for b in layer.bias])
            values = values @ weights.T + bias
        elif layer.kind is LayerKind.RELU:
            values = np.maximum(values, 0.0)
        elif layer.function_id.value == "sigmoid":
            values = 1.0 / (1.0 + np.exp(-values))
        else:
            values = np.tanh(values)
    return values


def grid_points(box: InputBox, per_dim: int) -> np.ndarray:
    axes = [np.linspace(float(d.lo), float(d.hi), per_dim) for d in box.dims]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.arity)


def random_relu_network(rng: random.Random, name: str, outputs: int = None) -> NetworkModel:
    arity = rng.randint(1, 2)
    depth = rng.randint(1, 3)
    layers, width = [], arity
    for index in range(depth):
        last = index == depth - 1
        units = outputs if last and outputs else rng.randint(1, 4)
        layers.append(
            Layer.affine(
                [[Fraction(rng.randint(-8, 8), 4) for _ in range(width)] for _ in range(units)],
                [Fraction(rng.randint(-8, 8), 8) for _ in range(units)],
            )
        )
        if not last:
            layers.append(Layer.relu())
        width = units
    return NetworkModel.build(name, arity, layers)


def random_monotone_network(rng: random.Random, name: str) -> NetworkModel:
    """One or two hidden layers, the first sigmoid or tanh, then a single output."""
    arity = rng.randint(1, 2)
    layers, width = [], arity
    for index in range(rng.randint(1, 2)):
        units = rng.randint(1, 4)
        layers.append(
            Layer.affine(
                [[Fraction(rng.randint(-8, 8), 4) for _ in range(width)] for _ in range(units)],
                [Fraction(rng.randint(-8, 8), 8) for _ in range(units)],
            )
        )
        activation = rng.choice(["sigmoid", "tanh"] if index == 0 else ["sigmoid", "tanh", "relu"])
        if activation == "relu":
            layers.append(Layer.relu())
        else:
            layers.append(Layer.monotone(activation, rng.choice([8, 16, 32])))
        width = units
    layers.append(Layer.affine([[Fraction(rng.randint(-8, 8), 4) for _ in range(width)]], [0]))
    return NetworkModel.build(name, arity, layers)


def random_box(rng: random.Random, arity: int) -> InputBox:
    dims = []
    for _ in range(arity):
        lo = Fraction(rng.randint(-8, 4), 8)
        dims.append(Interval(lo, lo + Fraction(rng.randint(1, 8), 8)))
    return InputBox(tuple(dims))


def per_dim_for(arity: int) -> int:
    return 2**14 + 1 if arity == 1 else 2**7 + 1
